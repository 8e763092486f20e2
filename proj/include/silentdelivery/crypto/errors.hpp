#pragma once

#include <stdexcept>

namespace sd {

struct CryptoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Signature did not verify, so no signer can be recovered.
struct VerificationError : CryptoError {
  using CryptoError::CryptoError;
};

/// Authenticated decryption failed (wrong key or tampered ciphertext).
struct AuthenticationError : CryptoError {
  using CryptoError::CryptoError;
};

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InsufficientSharesError : ParameterError {
  using ParameterError::ParameterError;
};

/// Peel attempted on an onion with no layers left.
struct OnionStateError : CryptoError {
  using CryptoError::CryptoError;
};

namespace detail {
void ensure_sodium();
}

}  // namespace sd
