#pragma once

#include <cstdint>
#include <optional>

#include "silentdelivery/actors/scenario.hpp"

namespace sd {

/// Sybil and bribery parameters. `x` adversarial mailmen join `v`
/// innocent ones, so the adversary's share of the pool is x / (x + v).
struct AttackParams {
  std::uint32_t v = 0;
  std::uint32_t x = 0;
  Amount d = kUnitsPerEther;
  Amount budget = 0;
  Amount bribe_per_key = 0;

  Rational p_m() const;
};

struct AttackOutcome {
  std::uint32_t shares_obtained = 0;
  bool key_recovered = false;
  /// Bribes paid, or deposits escrowed by Sybil identities.
  Amount total_spent = 0;
  /// Deposits of bribed or adversarial mailmen seized by the agent.
  Amount deposits_forfeited = 0;
  std::uint32_t offers = 0;
  std::uint32_t keys_bought = 0;
  ScenarioTrace trace;
};

struct BriberyOptions {
  Amount bribe_per_key = kUnitsPerEther;
  /// Whether the adversary learns who was recruited and at which position
  /// (side-channel knowledge). Without it offers go to uniformly drawn
  /// pool members.
  bool side_channel = true;
  /// Adversary funds; defaults to one bribe per pool member.
  std::optional<Amount> budget;
};

/// Sets up `scenario`, then buys time-frame private keys before delivery.
/// A briberable mailman sells iff the bribe exceeds its deposit. Each sold
/// key is published by the escrow, so dutiful mailmen can report it as a
/// premature disclosure. The protocol then runs to settlement.
AttackOutcome run_bribery(const ScenarioConfig& scenario, const BriberyOptions& options);

/// Registers `x` adversarial mailmen next to the scenario's pool (which is
/// taken to be the v innocent ones) and counts the shares whose every
/// layer holder is adversarial. The adversary peels those onions with its
/// own keys and tries to restore the sender's key. The service itself is
/// not run.
AttackOutcome run_sybil(const ScenarioConfig& scenario, std::uint32_t x);

/// Selection-only Monte Carlo of the Sybil attack.
struct SybilEstimate {
  std::uint32_t trials = 0;
  /// Mean captured shares per service.
  double mean_captured = 0.0;
  double var_captured = 0.0;
  /// Fraction of trials with at least t captured shares.
  double success_rate = 0.0;
  /// Fraction of shares captured over all trials.
  double share_capture_rate = 0.0;
  /// Deposits the adversary escrows per share-threshold's worth of
  /// captured shares: x·d·t / mean_captured.
  double expected_deposit = 0.0;
};

SybilEstimate sybil_monte_carlo(std::uint32_t l, std::uint32_t t, std::uint32_t n, std::uint32_t v, std::uint32_t x,
                                double d, std::uint32_t trials, std::uint64_t seed);

/// Errors from inject_fault.
struct UnknownMailmanError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Overrides the policy of recruitment position `position` (1-based) for
/// the run. Only premature, absent and fake are accepted kinds.
void inject_fault(ScenarioConfig& scenario, std::uint32_t position, FaultPolicy kind);

}  // namespace sd
