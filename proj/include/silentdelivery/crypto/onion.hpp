#pragma once

#include <span>
#include <vector>

#include "silentdelivery/crypto/box.hpp"
#include "silentdelivery/crypto/shamir.hpp"

namespace sd {

/// A share sealed under l time-frame public keys, one layer per key.
///
/// Wrap order defines peel order: the LAST key in the wrap list seals the
/// outermost layer and is peeled first. `layer_keys` is sender-side
/// bookkeeping of the keys still wrapping the payload (outermost last);
/// it is not part of the wire encoding, so broadcasting an onion does not
/// reveal which mailmen hold it.
struct Onion {
  unsigned layers_remaining = 0;
  Bytes payload;
  std::vector<BoxPublicKey> layer_keys;

  bool operator==(const Onion&) const = default;
};

Onion onion_wrap(const Share& share, std::span<const BoxPublicKey> layer_keys, Rng& rng);

/// Removes the outermost layer. Throws AuthenticationError when `secret`
/// does not open it and OnionStateError when no layers remain.
Onion onion_peel(const Onion& onion, const BoxSecretKey& secret);

/// Payload of a fully peeled onion. Throws OnionStateError if layers remain.
Share onion_share(const Onion& onion);

Bytes encode_onion(const Onion& onion);
Onion decode_onion(ByteView wire);

}  // namespace sd
