#pragma once

#include <string_view>

#include <json.hpp>

#include "silentdelivery/crypto/box.hpp"
#include "silentdelivery/crypto/signature.hpp"
#include "silentdelivery/crypto/symmetric.hpp"
#include "silentdelivery/ledger/ledger.hpp"

namespace sd {

/// A silent-recruitment agreement: the mailman's signature over
/// (switch, index) and the sender's countersignature over
/// (switch, index, vrs_m).
struct Agreement {
  std::uint32_t index = 0;
  Signature vrs_s;
  Signature vrs_m;

  bool operator==(const Agreement&) const = default;
};

namespace abi {

Digest256 mailman_digest(const Address& switch_addr, std::uint32_t index);
Digest256 sender_digest(const Address& switch_addr, std::uint32_t index, const Signature& vrs_m);
Digest256 supplementary_digest(const Address& switch_addr, ByteView sup_code);

/// Code blob of the supplementary contract bound to one agent contract.
/// Mailmen compare the code they are handed against this before signing.
Bytes supplementary_code(const Address& agent);

nlohmann::json encode(const Agreement& a);
Agreement decode_agreement(const nlohmann::json& j);
nlohmann::json encode(const TimeFrame& f);
TimeFrame decode_timeframe(const nlohmann::json& j);

// Typed argument readers. Each throws Revert on a missing or malformed field.
Address address_arg(const nlohmann::json& args, std::string_view key);
Signature signature_arg(const nlohmann::json& args, std::string_view key);
Digest256 digest_arg(const nlohmann::json& args, std::string_view key);
FixedBytes<32> bytes32_arg(const nlohmann::json& args, std::string_view key);
Bytes bytes_arg(const nlohmann::json& args, std::string_view key);
std::uint32_t u32_arg(const nlohmann::json& args, std::string_view key);
const nlohmann::json& array_arg(const nlohmann::json& args, std::string_view key);

}  // namespace abi
}  // namespace sd
