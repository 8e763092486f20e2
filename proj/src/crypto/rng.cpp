#include "silentdelivery/crypto/rng.hpp"

#include "silentdelivery/crypto/hash.hpp"

namespace sd {

Rng Rng::fork(std::string_view label) const {
  Bytes material;
  append_u64(material, seed_);
  append(material, as_bytes(label));
  auto d = hash256(material);
  std::uint64_t child = 0;
  for (int i = 0; i < 8; ++i) child = child << 8 | d.bytes[i];
  return Rng(child);
}

std::uint64_t Rng::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) std::swap(lo, hi);
  const std::uint64_t span = hi - lo;
  if (span == max()) return engine_();
  const std::uint64_t range = span + 1;
  // Reject the low 2^64 mod range values so every residue is equally likely.
  const std::uint64_t reject_below = (0 - range) % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x < reject_below);
  return lo + x % range;
}

double Rng::real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t i = 0;
  while (i < out.size()) {
    auto word = engine_();
    for (int k = 0; k < 8 && i < out.size(); ++k, ++i) out[i] = static_cast<std::uint8_t>(word >> (8 * k));
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

}  // namespace sd
