#include "silentdelivery/crypto/shamir.hpp"

#include <set>

#include "silentdelivery/crypto/errors.hpp"

namespace sd {

PrimeField::PrimeField(BigInt modulus) : p_(std::move(modulus)) {
  if (p_ < 2) throw ParameterError("field modulus must be at least 2");
}

const PrimeField& PrimeField::standard() {
  static const PrimeField f(BigInt("0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F"));
  return f;
}

const PrimeField& PrimeField::small() {
  static const PrimeField f(BigInt(257));
  return f;
}

BigInt PrimeField::reduce(const BigInt& x) const {
  BigInt r = x % p_;
  if (r < 0) r += p_;
  return r;
}

BigInt PrimeField::inv(const BigInt& a) const {
  BigInt x = reduce(a);
  if (x == 0) throw ParameterError("zero has no inverse");
  return boost::multiprecision::powm(x, p_ - 2, p_);
}

BigInt PrimeField::random(Rng& rng) const {
  const auto bits = boost::multiprecision::msb(p_) + 1;
  const auto nbytes = (bits + 7) / 8;
  const unsigned excess = static_cast<unsigned>(nbytes * 8 - bits);
  for (;;) {
    Bytes raw = rng.bytes(nbytes);
    raw[0] &= static_cast<std::uint8_t>(0xff >> excess);
    BigInt v = to_bigint(raw);
    if (v < p_) return v;
  }
}

std::vector<Share> split_with_coefficients(const BigInt& secret, std::span<const BigInt> coefficients, unsigned n,
                                           const PrimeField& field) {
  const unsigned t = static_cast<unsigned>(coefficients.size()) + 1;
  if (t < 1 || t > n) throw ParameterError("threshold must satisfy 1 <= t <= n");
  if (BigInt(n) >= field.modulus()) throw ParameterError("share count must be below the field size");
  if (secret < 0) throw ParameterError("secret must be non-negative");

  const BigInt constant = field.reduce(secret);
  const BigInt overflow = secret / field.modulus();
  std::vector<Share> shares;
  shares.reserve(n);
  for (unsigned x = 1; x <= n; ++x) {
    // Horner evaluation, highest degree first.
    BigInt acc = 0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
      acc = field.add(field.mul(acc, x), *it);
    acc = field.add(field.mul(acc, x), constant);
    shares.push_back({x, acc, overflow});
  }
  return shares;
}

BigInt restore_value(std::span<const Share> shares, unsigned t, const PrimeField& field) {
  if (t < 1) throw ParameterError("threshold must be at least 1");
  if (shares.size() < t) throw InsufficientSharesError("fewer than t shares");
  std::set<std::uint32_t> seen;
  for (const auto& s : shares) {
    if (s.index == 0) throw ParameterError("share index 0 is reserved for the secret");
    if (!seen.insert(s.index).second) throw ParameterError("duplicate share index");
  }

  auto used = shares.first(t);
  BigInt secret = 0;
  for (std::size_t i = 0; i < used.size(); ++i) {
    BigInt num = 1, den = 1;
    const BigInt xi = used[i].index;
    for (std::size_t j = 0; j < used.size(); ++j) {
      if (i == j) continue;
      const BigInt xj = used[j].index;
      num = field.mul(num, xj);
      den = field.mul(den, field.sub(xj, xi));
    }
    secret = field.add(secret, field.mul(used[i].value, field.mul(num, field.inv(den))));
  }
  return secret;
}

std::vector<Share> ss_split(const SecretKey256& key, unsigned t, unsigned n, Rng& rng, const PrimeField& field) {
  if (t < 1 || t > n) throw ParameterError("threshold must satisfy 1 <= t <= n");
  std::vector<BigInt> coeffs;
  coeffs.reserve(t - 1);
  for (unsigned i = 1; i < t; ++i) coeffs.push_back(field.random(rng));
  return split_with_coefficients(to_bigint(key.view()), coeffs, n, field);
}

SecretKey256 ss_restore(std::span<const Share> shares, unsigned t, const PrimeField& field) {
  BigInt value = restore_value(shares, t, field);
  BigInt full = value + shares.front().overflow * field.modulus();
  Bytes raw = to_bytes(full);
  if (raw.size() > 32) throw ParameterError("restored value exceeds 256 bits");
  SecretKey256 key;
  std::copy(raw.begin(), raw.end(), key.bytes.begin() + (32 - raw.size()));
  return key;
}

BigInt to_bigint(ByteView big_endian) {
  BigInt out;
  if (big_endian.empty()) return out;
  boost::multiprecision::import_bits(out, big_endian.begin(), big_endian.end(), 8, true);
  return out;
}

Bytes to_bytes(const BigInt& x) {
  Bytes out;
  if (x == 0) return out;
  boost::multiprecision::export_bits(x, std::back_inserter(out), 8, true);
  return out;
}

Bytes encode_share(const Share& s) {
  Bytes out;
  append_u32(out, s.index);
  for (const BigInt* part : {&s.value, &s.overflow}) {
    Bytes raw = to_bytes(*part);
    append_u32(out, static_cast<std::uint32_t>(raw.size()));
    append(out, raw);
  }
  return out;
}

Share decode_share(ByteView bytes) {
  auto read_u32 = [&](std::size_t& pos) {
    if (pos + 4 > bytes.size()) throw ParameterError("truncated share encoding");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | bytes[pos++];
    return v;
  };
  std::size_t pos = 0;
  Share s;
  s.index = read_u32(pos);
  for (BigInt* part : {&s.value, &s.overflow}) {
    auto len = read_u32(pos);
    if (pos + len > bytes.size()) throw ParameterError("truncated share encoding");
    *part = to_bigint(bytes.subspan(pos, len));
    pos += len;
  }
  if (pos != bytes.size()) throw ParameterError("trailing bytes after share");
  return s;
}

}  // namespace sd
