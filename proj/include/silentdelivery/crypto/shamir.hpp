#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <vector>

#include "silentdelivery/crypto/rng.hpp"
#include "silentdelivery/crypto/symmetric.hpp"

namespace sd {

using BigInt = boost::multiprecision::cpp_int;

/// Arithmetic modulo a fixed prime.
class PrimeField {
 public:
  explicit PrimeField(BigInt modulus);

  /// secp256k1 base-field prime, 2^256 - 2^32 - 977. Default share field.
  static const PrimeField& standard();
  /// p = 257. Small field for hand-checkable oracle tests.
  static const PrimeField& small();

  const BigInt& modulus() const { return p_; }
  BigInt reduce(const BigInt& x) const;
  BigInt add(const BigInt& a, const BigInt& b) const { return reduce(a + b); }
  BigInt sub(const BigInt& a, const BigInt& b) const { return reduce(a - b); }
  BigInt mul(const BigInt& a, const BigInt& b) const { return reduce(a * b); }
  BigInt inv(const BigInt& a) const;
  BigInt random(Rng& rng) const;

 private:
  BigInt p_;
};

/// One point of a Shamir polynomial. `overflow` is floor(key / p) for the
/// key that was split; it lets restore return the exact 256-bit key even
/// though shares live in the field.
struct Share {
  std::uint32_t index = 0;
  BigInt value;
  BigInt overflow;

  bool operator==(const Share&) const = default;
};

/// Evaluates secret + c1*x + ... + c_{t-1}*x^{t-1} at x = 1..n.
std::vector<Share> split_with_coefficients(const BigInt& secret, std::span<const BigInt> coefficients, unsigned n,
                                           const PrimeField& field);

/// Lagrange interpolation at 0 over the first `t` shares.
/// Throws InsufficientSharesError for fewer than t shares and
/// ParameterError for duplicate or zero indices.
BigInt restore_value(std::span<const Share> shares, unsigned t, const PrimeField& field);

/// (t, n) split of a 256-bit key with fresh random coefficients.
std::vector<Share> ss_split(const SecretKey256& key, unsigned t, unsigned n, Rng& rng,
                            const PrimeField& field = PrimeField::standard());
SecretKey256 ss_restore(std::span<const Share> shares, unsigned t,
                        const PrimeField& field = PrimeField::standard());

BigInt to_bigint(ByteView big_endian);
Bytes to_bytes(const BigInt& x);

Bytes encode_share(const Share& s);
Share decode_share(ByteView bytes);

}  // namespace sd
