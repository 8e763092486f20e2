#include "silentdelivery/crypto/symmetric.hpp"

#include <sodium.h>

#include "silentdelivery/crypto/errors.hpp"

namespace sd {

SecretKey256 random_secret(Rng& rng) { return SecretKey256::from(rng.fixed<32>()); }

Bytes sym_encrypt(const SecretKey256& key, ByteView plaintext, Rng& rng) {
  detail::ensure_sodium();
  constexpr auto kNonce = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
  Bytes out(kNonce + plaintext.size() + crypto_aead_xchacha20poly1305_ietf_ABYTES);
  rng.fill({out.data(), kNonce});
  unsigned long long written = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(out.data() + kNonce, &written, plaintext.data(), plaintext.size(),
                                             nullptr, 0, nullptr, out.data(), key.bytes.data());
  out.resize(kNonce + written);
  return out;
}

Bytes sym_decrypt(const SecretKey256& key, ByteView ciphertext) {
  detail::ensure_sodium();
  constexpr auto kNonce = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
  constexpr auto kTag = crypto_aead_xchacha20poly1305_ietf_ABYTES;
  if (ciphertext.size() < kNonce + kTag) throw AuthenticationError("ciphertext too short");
  Bytes out(ciphertext.size() - kNonce - kTag);
  unsigned long long written = 0;
  if (crypto_aead_xchacha20poly1305_ietf_decrypt(out.data(), &written, nullptr, ciphertext.data() + kNonce,
                                                 ciphertext.size() - kNonce, nullptr, 0, ciphertext.data(),
                                                 key.bytes.data()) != 0)
    throw AuthenticationError("symmetric decryption failed");
  out.resize(written);
  return out;
}

}  // namespace sd
