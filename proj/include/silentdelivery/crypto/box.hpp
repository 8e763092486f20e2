#pragma once

#include "silentdelivery/crypto/bytes.hpp"
#include "silentdelivery/crypto/rng.hpp"

namespace sd {

struct BoxPublicKey : FixedBytes<32> {
  static BoxPublicKey from(const FixedBytes<32>& f) { return BoxPublicKey{f}; }
};
struct BoxSecretKey : FixedBytes<32> {
  static BoxSecretKey from(const FixedBytes<32>& f) { return BoxSecretKey{f}; }
};

/// X25519 key pair. Used for per-time-frame onion keys and for the
/// private-channel ("whisper") keys.
struct BoxKeyPair {
  BoxSecretKey secret;
  BoxPublicKey pub;
};

BoxKeyPair box_keypair(Rng& rng);
BoxPublicKey box_public_of(const BoxSecretKey& secret);
/// True iff `secret` is the private half of `pub`.
bool box_pairs(const BoxSecretKey& secret, const BoxPublicKey& pub);

/// Anonymous authenticated public-key encryption. The ephemeral key is
/// drawn from `rng`, so sealing is deterministic under a fixed seed.
/// Output layout is libsodium's sealed box (ephemeral pk || MAC || ct).
Bytes seal(const BoxPublicKey& to, ByteView plaintext, Rng& rng);
/// Throws AuthenticationError if `secret` is not the addressee's key or
/// the ciphertext was tampered with.
Bytes open_sealed(const BoxSecretKey& secret, ByteView sealed);

inline constexpr std::size_t kSealOverhead = 48;

}  // namespace sd
