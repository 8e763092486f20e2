#pragma once

#include <map>
#include <optional>
#include <vector>

#include "silentdelivery/actors/scenario.hpp"
#include "silentdelivery/crypto/onion.hpp"
#include "silentdelivery/crypto/symmetric.hpp"

namespace sd {

// Off-chain topics.
namespace topic {
inline constexpr const char* kInvite = "RCRT";
inline constexpr const char* kAgree = "AGRE";
inline constexpr const char* kRefuse = "RFSE";
inline constexpr const char* kCountersign = "CSGN";
inline constexpr const char* kOnions = "ONIN";
inline constexpr const char* kBundle = "BNDL";
inline constexpr const char* kDelivery = "DLVR";
inline constexpr const char* kResend = "RSND";
inline constexpr const char* kReveal = "RVEL";
inline constexpr const char* kPublicKey = "PKEY";
inline constexpr const char* kLeak = "LEAK";
inline constexpr const char* kShare = "SHAR";
}  // namespace topic

struct SenderActor {
  KeyPair account;
  BoxKeyPair whisper;
  Address switch_addr;
  Address sup_addr;
  SecretKey256 key;
  FixedBytes<32> receipt;
  Bytes info;
  Bytes sup_code;
  Signature vrs_sup;
  /// Pool index per recruitment position (index 0 is position 1).
  std::vector<std::uint32_t> selected;
  std::vector<Agreement> agreements;
  std::vector<Share> shares;
  std::vector<Onion> onions;
  Bytes onion_wire;
  Bytes delivery;
  Signature vrs_st;
  Bytes bundle;
  Signature vrs_sm;
};

struct MailmanActor {
  std::uint32_t pool_index = 0;
  KeyPair account;
  BoxKeyPair whisper;
  BoxKeyPair frame_key;
  FaultPolicy policy = FaultPolicy::honest;
  Rng rng{0};

  // Set once recruited.
  std::optional<std::uint32_t> position;
  Address switch_addr;
  Bytes sup_code;
  Signature vrs_sup;
  Signature vrs_m;
  Signature vrs_s;
  Bytes bundle;
  Signature vrs_sm;
  std::vector<Onion> onions;
  std::vector<BoxSecretKey> public_keys_seen;
  bool bribed = false;

  /// Follows the reporting and switching duties of the protocol. A mailman
  /// that sold its key no longer does.
  bool dutiful() const;
  /// Key this mailman publishes when it does reveal.
  BoxSecretKey published_key();
};

struct RecipientActor {
  KeyPair account;
  BoxKeyPair whisper;
  Bytes delivery;
  Bytes onion_wire;
  std::vector<Onion> onions;
  std::vector<BoxSecretKey> keys;
  std::optional<SecretKey256> key;
  std::optional<FixedBytes<32>> receipt;
  Bytes info;
  bool submitted = false;
};

/// Remembers single-layer peel attempts so re-peeling with a growing key
/// set never repeats public-key work.
class PeelCache {
 public:
  std::optional<Onion> peel(const Onion& onion, const BoxSecretKey& key);

 private:
  std::map<std::pair<Digest256, BoxSecretKey>, std::optional<Onion>> memo_;
};

/// Peels each onion with whichever keys open its layers. Returns the
/// shares of onions peeled to the core.
std::vector<Share> peel_all(const std::vector<Onion>& onions, const std::vector<BoxSecretKey>& keys,
                            PeelCache& cache);

Bytes encode_onion_set(const std::vector<Onion>& onions);
std::vector<Onion> decode_onion_set(ByteView wire);

Bytes encode_agreements(const std::vector<Agreement>& agreements);
std::vector<Agreement> decode_agreements(ByteView bytes);

/// Plaintext of E(key, [info, receipt]).
Bytes delivery_plaintext(const FixedBytes<32>& receipt, ByteView info);
/// Splits a delivery plaintext back into (receipt, info).
std::pair<FixedBytes<32>, Bytes> split_delivery(ByteView plaintext);

Digest256 delivery_digest(ByteView delivery, ByteView onion_wire);

Bytes json_bytes(const nlohmann::json& j);
nlohmann::json parse_json_bytes(ByteView b);

}  // namespace sd

namespace sd {

/// Checks a recruitment invitation the way a mailman does before signing:
/// the switch belongs to `sender`, the service on chain matches the
/// invitation, the supplementary code is the agent's and is signed by the
/// sender, and `mailman` holds a key for the time frame.
bool verify_invitation(const Ledger& ledger, const Address& agent, const Address& sender, const Address& mailman,
                       const nlohmann::json& invite);

}  // namespace sd
