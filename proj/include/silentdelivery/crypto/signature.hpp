#pragma once

#include "silentdelivery/crypto/bytes.hpp"
#include "silentdelivery/crypto/rng.hpp"

namespace sd {

/// Account key pair. `privkey` is the 32-byte seed; the address is the
/// low 20 bytes of hash256(pubkey).
struct KeyPair {
  FixedBytes<32> privkey;
  FixedBytes<32> pubkey;
  Address address;
};

/// Recoverable signature ("vrs"): the signer's public key followed by an
/// Ed25519 signature over the digest. Recovery checks the signature and
/// derives the signer address from the embedded key.
struct Signature : FixedBytes<96> {
  static Signature from(const FixedBytes<96>& f) { return Signature{f}; }
};

KeyPair keypair_from_seed(const FixedBytes<32>& seed);
KeyPair keypair_gen(Rng& rng);
Address address_of(const FixedBytes<32>& pubkey);

Signature sign(const KeyPair& signer, const Digest256& digest);
/// Throws VerificationError when the signature does not verify over `digest`.
Address recover_signer(const Digest256& digest, const Signature& sig);

}  // namespace sd
