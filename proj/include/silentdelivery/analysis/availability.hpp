#pragma once

#include <cstdint>

namespace sd {

/// Service-availability model: each of n shares is wrapped by l mailmen,
/// each present with probability A_T, and t shares restore the key.
struct AvailabilityParams {
  std::uint32_t l = 0;
  std::uint32_t t = 0;
  std::uint32_t n = 0;
  double a_t = 1.0;

  /// Throws std::invalid_argument on a domain violation.
  void validate() const;
  /// Probability that a share is lost: P = 1 - A_T^l.
  long double share_loss() const;
};

/// A_S = 1 - sum_{i=n-t+1}^{n} C(n,i) P^i (1-P)^(n-i), that is the
/// binomial CDF of lost shares at n - t.
long double availability(std::uint32_t l, std::uint32_t t, std::uint32_t n, double a_t);

struct MonteCarloEstimate {
  double estimate = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  /// Binomial standard error of `estimate` at probability `p`.
  double sigma_at(double p) const;
};

/// Samples every mailman's presence independently and counts the trials
/// in which at least t shares have all l holders present.
MonteCarloEstimate availability_mc(std::uint32_t l, std::uint32_t t, std::uint32_t n, double a_t,
                                   std::uint64_t trials, std::uint64_t seed);

}  // namespace sd
