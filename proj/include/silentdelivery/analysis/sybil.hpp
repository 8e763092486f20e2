#pragma once

#include <cstdint>
#include <stdexcept>

#include "silentdelivery/ledger/amount.hpp"

namespace sd {

struct DegenerateCaseError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Deposit the adversary escrows, per t shares captured on average, when a
/// fraction p_m of the pool is its own:
///   d_hat = x·d·t / (n·p_m^l),  x = v·p_m / (1 - p_m)
///         = (v·d·t / n) · p_m^(1-l) / (1 - p_m).
long double sybil_expected_deposit(std::uint32_t l, long double v, long double d, std::uint32_t t, std::uint32_t n,
                                   long double p_m);

/// Fraction minimising sybil_expected_deposit: (l-1)/l. Throws
/// DegenerateCaseError for l = 1, where the minimum is approached only as
/// p_m -> 0.
Rational optimal_sybil_fraction(std::uint32_t l);

/// Adversarial identity count at the optimum: x = v·p/(1-p) with
/// p = (l-1)/l, which is (l-1)·v.
long double optimal_sybil_count(std::uint32_t l, long double v);

/// Deposits escrowed by the optimal Sybil population, x·d = (l-1)·v·d.
///
/// This is the quantity the lower bound talks about. It is not the minimum
/// of sybil_expected_deposit itself: substituting p = (l-1)/l there gives
///   (v·d·t/n) · l^l / (l-1)^(l-1),
/// and the t/n factor does not cancel. The bound is obtained by evaluating
/// x = v·p/(1-p) at the minimiser, which is independent of t and n.
long double sybil_min_deposit(std::uint32_t l, long double v, long double d);

struct SybilNumericOptimum {
  long double argmin = 0;
  long double min_expected_deposit = 0;
  /// x·d at the numeric argmin.
  long double deposit_at_argmin = 0;
};

/// Brent minimisation of sybil_expected_deposit over p_m in (0, 1), in
/// 50-digit arithmetic. Independent of the closed forms above.
SybilNumericOptimum minimize_sybil_numeric(std::uint32_t l, long double v, long double d, std::uint32_t t,
                                           std::uint32_t n);

/// Cheapest bribery that assembles t shares: every one of the l layer
/// keys of t shares, each priced at the holder's deposit d.
long double bribery_cost(std::uint32_t t, std::uint32_t l, long double d);

}  // namespace sd
