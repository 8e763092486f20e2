#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "silentdelivery/config/config_file.hpp"

namespace sd {

enum class SweepAxis { n, a_t, l, x, bribe };
std::string to_string(SweepAxis a);
SweepAxis parse_sweep_axis(std::string_view s);

/// "a:b:step" (inclusive) or a comma-separated list.
std::vector<double> parse_sweep_range(std::string_view text);

/// A plot-ready table: one row per axis point, analytic and empirical
/// columns side by side.
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<nlohmann::ordered_json> rows;

  std::string to_csv() const;
  std::string to_jsonl() const;
};

struct SweepOptions {
  /// Monte Carlo trials per point for the availability and Sybil axes.
  std::uint32_t trials = 10000;
};

/// Evaluates `base` at every point of `axis`. Points run in axis order.
/// Throws ConfigError when a point does not give a valid scenario.
SweepTable run_sweep(SweepAxis axis, const std::vector<double>& points, const RunConfig& base,
                     const SweepOptions& options = {});

}  // namespace sd
