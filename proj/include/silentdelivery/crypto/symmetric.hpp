#pragma once

#include "silentdelivery/crypto/bytes.hpp"
#include "silentdelivery/crypto/rng.hpp"

namespace sd {

/// 256-bit symmetric secret (the delivery `key`, and `receipt`).
struct SecretKey256 : FixedBytes<32> {
  static SecretKey256 from(const FixedBytes<32>& f) { return SecretKey256{f}; }
};

SecretKey256 random_secret(Rng& rng);

/// XChaCha20-Poly1305. Ciphertext layout: nonce (24) || ct || tag (16).
Bytes sym_encrypt(const SecretKey256& key, ByteView plaintext, Rng& rng);
/// Throws AuthenticationError on wrong key or tampering.
Bytes sym_decrypt(const SecretKey256& key, ByteView ciphertext);

}  // namespace sd
