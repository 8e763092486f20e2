#include "silentdelivery/actors/participants.hpp"

#include <algorithm>

#include "silentdelivery/crypto/errors.hpp"
#include "silentdelivery/crypto/hash.hpp"

namespace sd {

bool MailmanActor::dutiful() const {
  if (bribed) return false;
  return policy == FaultPolicy::honest || policy == FaultPolicy::withhold_light || policy == FaultPolicy::briberable;
}

BoxSecretKey MailmanActor::published_key() {
  if (policy == FaultPolicy::fake) return BoxSecretKey::from(rng.fixed<32>());
  return frame_key.secret;
}

std::optional<Onion> PeelCache::peel(const Onion& onion, const BoxSecretKey& key) {
  auto k = std::make_pair(hash256(onion.payload), key);
  auto it = memo_.find(k);
  if (it != memo_.end()) return it->second;
  std::optional<Onion> out;
  try {
    out = onion_peel(onion, key);
  } catch (const AuthenticationError&) {
  }
  memo_.emplace(k, out);
  return out;
}

std::vector<Share> peel_all(const std::vector<Onion>& onions, const std::vector<BoxSecretKey>& keys,
                            PeelCache& cache) {
  std::vector<Share> out;
  for (const auto& onion : onions) {
    Onion cur = onion;
    while (cur.layers_remaining > 0) {
      std::optional<Onion> next;
      for (const auto& k : keys)
        if ((next = cache.peel(cur, k))) break;
      if (!next) break;
      cur = std::move(*next);
    }
    if (cur.layers_remaining == 0) {
      try {
        out.push_back(onion_share(cur));
      } catch (const std::exception&) {
      }
    }
  }
  return out;
}

Bytes encode_onion_set(const std::vector<Onion>& onions) {
  Bytes out;
  append_u32(out, static_cast<std::uint32_t>(onions.size()));
  for (const auto& o : onions) {
    auto wire = encode_onion(o);
    append_u32(out, static_cast<std::uint32_t>(wire.size()));
    append(out, wire);
  }
  return out;
}

namespace {
std::uint32_t read_u32(ByteView b, std::size_t& pos) {
  if (pos + 4 > b.size()) throw std::invalid_argument("truncated onion set");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | b[pos++];
  return v;
}
}  // namespace

std::vector<Onion> decode_onion_set(ByteView wire) {
  std::size_t pos = 0;
  auto count = read_u32(wire, pos);
  std::vector<Onion> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto len = read_u32(wire, pos);
    if (pos + len > wire.size()) throw std::invalid_argument("truncated onion set");
    out.push_back(decode_onion(wire.subspan(pos, len)));
    pos += len;
  }
  return out;
}

Bytes encode_agreements(const std::vector<Agreement>& agreements) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& a : agreements) j.push_back(abi::encode(a));
  return json_bytes(j);
}

std::vector<Agreement> decode_agreements(ByteView bytes) {
  std::vector<Agreement> out;
  for (const auto& e : parse_json_bytes(bytes)) out.push_back(abi::decode_agreement(e));
  return out;
}

Bytes delivery_plaintext(const FixedBytes<32>& receipt, ByteView info) {
  Bytes out(receipt.bytes.begin(), receipt.bytes.end());
  append(out, info);
  return out;
}

std::pair<FixedBytes<32>, Bytes> split_delivery(ByteView plaintext) {
  if (plaintext.size() < 32) throw std::invalid_argument("delivery plaintext too short");
  return {FixedBytes<32>::from_view(plaintext.first(32)), Bytes(plaintext.begin() + 32, plaintext.end())};
}

Digest256 delivery_digest(ByteView delivery, ByteView onion_wire) {
  return hash_fields({as_bytes("vrs_st"), delivery, onion_wire});
}

Bytes json_bytes(const nlohmann::json& j) {
  auto s = j.dump();
  return Bytes(s.begin(), s.end());
}

nlohmann::json parse_json_bytes(ByteView b) {
  return nlohmann::json::parse(std::string(b.begin(), b.end()));
}

}  // namespace sd
