#include "silentdelivery/crypto/box.hpp"

#include <sodium.h>

#include "silentdelivery/crypto/errors.hpp"

namespace sd {

BoxKeyPair box_keypair(Rng& rng) {
  detail::ensure_sodium();
  auto seed = rng.fixed<crypto_box_SEEDBYTES>();
  BoxKeyPair kp;
  crypto_box_seed_keypair(kp.pub.bytes.data(), kp.secret.bytes.data(), seed.bytes.data());
  return kp;
}

BoxPublicKey box_public_of(const BoxSecretKey& secret) {
  detail::ensure_sodium();
  BoxPublicKey pub;
  crypto_scalarmult_base(pub.bytes.data(), secret.bytes.data());
  return pub;
}

bool box_pairs(const BoxSecretKey& secret, const BoxPublicKey& pub) { return box_public_of(secret) == pub; }

Bytes seal(const BoxPublicKey& to, ByteView plaintext, Rng& rng) {
  detail::ensure_sodium();
  auto eph = box_keypair(rng);

  std::array<std::uint8_t, crypto_box_NONCEBYTES> nonce{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, nonce.size());
  crypto_generichash_update(&st, eph.pub.bytes.data(), eph.pub.bytes.size());
  crypto_generichash_update(&st, to.bytes.data(), to.bytes.size());
  crypto_generichash_final(&st, nonce.data(), nonce.size());

  Bytes out(crypto_box_PUBLICKEYBYTES + crypto_box_MACBYTES + plaintext.size());
  std::copy(eph.pub.bytes.begin(), eph.pub.bytes.end(), out.begin());
  if (crypto_box_easy(out.data() + crypto_box_PUBLICKEYBYTES, plaintext.data(), plaintext.size(), nonce.data(),
                      to.bytes.data(), eph.secret.bytes.data()) != 0)
    throw CryptoError("sealing failed");
  sodium_memzero(eph.secret.bytes.data(), eph.secret.bytes.size());
  return out;
}

Bytes open_sealed(const BoxSecretKey& secret, ByteView sealed) {
  detail::ensure_sodium();
  if (sealed.size() < crypto_box_SEALBYTES) throw AuthenticationError("sealed payload too short");
  auto pub = box_public_of(secret);
  Bytes out(sealed.size() - crypto_box_SEALBYTES);
  if (crypto_box_seal_open(out.data(), sealed.data(), sealed.size(), pub.bytes.data(), secret.bytes.data()) != 0)
    throw AuthenticationError("sealed payload does not open under this key");
  return out;
}

}  // namespace sd
