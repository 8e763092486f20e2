#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

#include "silentdelivery/crypto/bytes.hpp"

namespace sd {

/// Seeded random source. Every random decision in a simulation flows
/// through one of these, so equal seeds give byte-identical runs.
///
/// Integer and real draws are derived from the raw 64-bit stream with
/// portable arithmetic (no std distributions), so results do not depend
/// on the standard library implementation.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const { return seed_; }

  /// Independent child stream. The child depends only on this stream's
  /// seed and the label, never on how much of this stream was consumed.
  Rng fork(std::string_view label) const;

  /// Uniform integer in [lo, hi] (inclusive).
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
  /// Uniform real in [0, 1).
  double real();
  bool bernoulli(double p) { return real() < p; }

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  template <std::size_t N>
  FixedBytes<N> fixed() {
    FixedBytes<N> out;
    fill(out.bytes);
    return out;
  }

  /// Fisher-Yates shuffle driven by uniform().
  template <typename Range>
  void shuffle(Range& r) {
    for (std::size_t i = r.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform(0, i - 1));
      std::swap(r[i - 1], r[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace sd
