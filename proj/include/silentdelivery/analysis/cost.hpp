#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "silentdelivery/actors/scenario.hpp"
#include "silentdelivery/ledger/gas_schedule.hpp"

namespace sd {

enum class CostMode { lightweight, heavyweight, strawman };
std::string to_string(CostMode m);
CostMode parse_cost_mode(std::string_view s);

struct CostLine {
  /// Gas-schedule key.
  std::string function;
  std::uint64_t calls = 0;
  std::uint64_t items = 0;
  std::uint64_t gas = 0;
  /// gas × gas_to_ether × ether_to_usd, exact.
  Rational usd;
  /// Sum of the published per-call (or per-item) USD figures, when every
  /// call has one.
  std::optional<Rational> published_usd;
};

struct CostBreakdown {
  CostMode mode = CostMode::lightweight;
  std::uint32_t n = 0;
  /// Service calls only: setup through the last delivery epoch.
  std::vector<CostLine> lines;
  std::uint64_t total_gas = 0;
  Rational total_usd;
  std::optional<Rational> published_total_usd;
  /// Linear model total = fixed + per_mailman · n.
  std::uint64_t fixed_gas = 0;
  std::uint64_t per_mailman_gas = 0;
  Rational fixed_usd;
  Rational per_mailman_usd;
  std::optional<Rational> published_fixed_usd;
  std::optional<Rational> published_per_mailman_usd;
  /// Trace reports only: every call including registration and
  /// settlement, and the fees they paid.
  std::uint64_t all_calls_gas = 0;
  Amount all_calls_fee = 0;

  nlohmann::json to_json() const;
};

/// Per-function gas and USD of a finished run. Throws UnknownFunctionError
/// for a call the schedule does not price.
CostBreakdown cost_report(const ScenarioTrace& trace, const GasSchedule& schedule = GasSchedule::defaults());

/// The calls a completed service makes in `mode` with n mailmen (recruited
/// mailmen for heavyweight), priced under `schedule`.
CostBreakdown cost_report(CostMode mode, std::uint32_t n, const GasSchedule& schedule = GasSchedule::defaults());

}  // namespace sd
