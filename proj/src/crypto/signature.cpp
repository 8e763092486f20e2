#include "silentdelivery/crypto/signature.hpp"

#include <sodium.h>

#include <algorithm>

#include "silentdelivery/crypto/errors.hpp"
#include "silentdelivery/crypto/hash.hpp"

namespace sd {

namespace detail {
void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw CryptoError("libsodium initialisation failed");
}
}  // namespace detail

Address address_of(const FixedBytes<32>& pubkey) {
  auto d = hash256(pubkey.view());
  Address a;
  std::copy(d.bytes.end() - 20, d.bytes.end(), a.bytes.begin());
  return a;
}

KeyPair keypair_from_seed(const FixedBytes<32>& seed) {
  detail::ensure_sodium();
  KeyPair kp;
  kp.privkey = seed;
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
  crypto_sign_seed_keypair(kp.pubkey.bytes.data(), sk.data(), seed.bytes.data());
  sodium_memzero(sk.data(), sk.size());
  kp.address = address_of(kp.pubkey);
  return kp;
}

KeyPair keypair_gen(Rng& rng) { return keypair_from_seed(rng.fixed<32>()); }

Signature sign(const KeyPair& signer, const Digest256& digest) {
  detail::ensure_sodium();
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk{};
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
  crypto_sign_seed_keypair(pk.data(), sk.data(), signer.privkey.bytes.data());
  Signature sig;
  std::copy(pk.begin(), pk.end(), sig.bytes.begin());
  crypto_sign_detached(sig.bytes.data() + 32, nullptr, digest.bytes.data(), digest.bytes.size(), sk.data());
  sodium_memzero(sk.data(), sk.size());
  return sig;
}

Address recover_signer(const Digest256& digest, const Signature& sig) {
  detail::ensure_sodium();
  const std::uint8_t* pk = sig.bytes.data();
  if (crypto_sign_verify_detached(sig.bytes.data() + 32, digest.bytes.data(), digest.bytes.size(), pk) != 0)
    throw VerificationError("signature does not verify over digest");
  return address_of(FixedBytes<32>::from_view({pk, 32}));
}

}  // namespace sd
