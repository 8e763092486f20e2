#include "silentdelivery/contracts/abi.hpp"

#include "silentdelivery/crypto/hash.hpp"

namespace sd::abi {

namespace {
Bytes u32_bytes(std::uint32_t v) {
  Bytes b;
  append_u32(b, v);
  return b;
}

const nlohmann::json& field(const nlohmann::json& args, std::string_view key) {
  auto it = args.find(key);
  if (it == args.end()) throw Revert("missing argument '" + std::string(key) + "'");
  return *it;
}

template <typename T>
T fixed_arg(const nlohmann::json& args, std::string_view key) {
  const auto& v = field(args, key);
  if (!v.is_string()) throw Revert("argument '" + std::string(key) + "' must be a hex string");
  try {
    return T::from(T::from_hex_string(v.get<std::string>()));
  } catch (const std::invalid_argument&) {
    throw Revert("argument '" + std::string(key) + "' has the wrong encoding");
  }
}
}  // namespace

Digest256 mailman_digest(const Address& switch_addr, std::uint32_t index) {
  return hash_fields({as_bytes("vrs_m"), switch_addr.view(), u32_bytes(index)});
}

Digest256 sender_digest(const Address& switch_addr, std::uint32_t index, const Signature& vrs_m) {
  return hash_fields({as_bytes("vrs_s"), switch_addr.view(), u32_bytes(index), vrs_m.view()});
}

Digest256 supplementary_digest(const Address& switch_addr, ByteView sup_code) {
  return hash_fields({as_bytes("vrs_sup"), switch_addr.view(), sup_code});
}

Bytes supplementary_code(const Address& agent) {
  Bytes code;
  append(code, as_bytes("silentdelivery/supplementary/v1"));
  append(code, agent.view());
  return code;
}

nlohmann::json encode(const Agreement& a) {
  return {{"index", a.index}, {"vrs_s", a.vrs_s.hex()}, {"vrs_m", a.vrs_m.hex()}};
}

Agreement decode_agreement(const nlohmann::json& j) {
  return {u32_arg(j, "index"), signature_arg(j, "vrs_s"), signature_arg(j, "vrs_m")};
}

nlohmann::json encode(const TimeFrame& f) { return {{"day", f.day}, {"slot", f.slot}}; }

TimeFrame decode_timeframe(const nlohmann::json& j) { return {u32_arg(j, "day"), u32_arg(j, "slot")}; }

Address address_arg(const nlohmann::json& args, std::string_view key) { return fixed_arg<Address>(args, key); }
Signature signature_arg(const nlohmann::json& args, std::string_view key) { return fixed_arg<Signature>(args, key); }
Digest256 digest_arg(const nlohmann::json& args, std::string_view key) { return fixed_arg<Digest256>(args, key); }

FixedBytes<32> bytes32_arg(const nlohmann::json& args, std::string_view key) {
  const auto& v = field(args, key);
  if (!v.is_string()) throw Revert("argument '" + std::string(key) + "' must be a hex string");
  try {
    return FixedBytes<32>::from_hex_string(v.get<std::string>());
  } catch (const std::invalid_argument&) {
    throw Revert("argument '" + std::string(key) + "' has the wrong encoding");
  }
}

Bytes bytes_arg(const nlohmann::json& args, std::string_view key) {
  const auto& v = field(args, key);
  if (!v.is_string()) throw Revert("argument '" + std::string(key) + "' must be a hex string");
  try {
    return from_hex(v.get<std::string>());
  } catch (const std::invalid_argument&) {
    throw Revert("argument '" + std::string(key) + "' is not hex");
  }
}

std::uint32_t u32_arg(const nlohmann::json& args, std::string_view key) {
  const auto& v = field(args, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::uint64_t>() > UINT32_MAX)
    throw Revert("argument '" + std::string(key) + "' must be a 32-bit unsigned integer");
  return v.get<std::uint32_t>();
}

const nlohmann::json& array_arg(const nlohmann::json& args, std::string_view key) {
  const auto& v = field(args, key);
  if (!v.is_array()) throw Revert("argument '" + std::string(key) + "' must be an array");
  return v;
}

}  // namespace sd::abi
