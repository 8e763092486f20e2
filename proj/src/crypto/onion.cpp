#include "silentdelivery/crypto/onion.hpp"

#include "silentdelivery/crypto/errors.hpp"

namespace sd {

Onion onion_wrap(const Share& share, std::span<const BoxPublicKey> layer_keys, Rng& rng) {
  if (layer_keys.empty()) throw ParameterError("an onion needs at least one layer");
  Onion onion;
  onion.payload = encode_share(share);
  for (const auto& key : layer_keys) {
    onion.payload = seal(key, onion.payload, rng);
    ++onion.layers_remaining;
  }
  onion.layer_keys.assign(layer_keys.begin(), layer_keys.end());
  return onion;
}

Onion onion_peel(const Onion& onion, const BoxSecretKey& secret) {
  if (onion.layers_remaining == 0) throw OnionStateError("onion has no layers left to peel");
  Onion inner;
  inner.payload = open_sealed(secret, onion.payload);
  inner.layers_remaining = onion.layers_remaining - 1;
  inner.layer_keys = onion.layer_keys;
  if (!inner.layer_keys.empty()) inner.layer_keys.pop_back();
  return inner;
}

Share onion_share(const Onion& onion) {
  if (onion.layers_remaining != 0) throw OnionStateError("onion still has layers");
  return decode_share(onion.payload);
}

Bytes encode_onion(const Onion& onion) {
  Bytes out(1 + onion.payload.size());
  out[0] = static_cast<std::uint8_t>(onion.layers_remaining);
  std::copy(onion.payload.begin(), onion.payload.end(), out.begin() + 1);
  return out;
}

Onion decode_onion(ByteView wire) {
  if (wire.empty()) throw ParameterError("empty onion encoding");
  Onion onion;
  onion.layers_remaining = wire[0];
  onion.payload.assign(wire.begin() + 1, wire.end());
  return onion;
}

}  // namespace sd
