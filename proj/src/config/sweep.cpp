#include "silentdelivery/config/sweep.hpp"

#include <cmath>
#include <sstream>

#include "silentdelivery/actors/driver.hpp"
#include "silentdelivery/adversary/attacks.hpp"
#include "silentdelivery/analysis/availability.hpp"
#include "silentdelivery/analysis/cost.hpp"
#include "silentdelivery/analysis/sybil.hpp"

namespace sd {

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::n: return "n";
    case SweepAxis::a_t: return "A_T";
    case SweepAxis::l: return "l";
    case SweepAxis::x: return "x";
    case SweepAxis::bribe: return "bribe";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view s) {
  if (s == "n") return SweepAxis::n;
  if (s == "A_T" || s == "a_t" || s == "availability") return SweepAxis::a_t;
  if (s == "l") return SweepAxis::l;
  if (s == "x") return SweepAxis::x;
  if (s == "bribe") return SweepAxis::bribe;
  throw std::invalid_argument("unknown sweep axis '" + std::string(s) + "' (expected n, A_T, l, x or bribe)");
}

std::vector<double> parse_sweep_range(std::string_view text) {
  auto number = [&](std::string_view s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(std::string(s), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("bad number '" + std::string(s) + "' in range");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == ':') {
        parts.push_back(number(text.substr(start, i - start)));
        start = i + 1;
      }
    }
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0) || b < a) throw std::invalid_argument("range needs start <= stop and a positive step");
    // Index-based stepping avoids accumulating rounding error.
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) out.push_back(a + static_cast<double>(k) * step);
  } else {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == ',') {
        out.push_back(number(text.substr(start, i - start)));
        start = i + 1;
      }
    }
  }
  if (out.empty()) throw std::invalid_argument("empty range");
  return out;
}

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const auto& v = row.at(columns[i]);
      os << (i ? "," : "") << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    os << "\n";
  }
  return os.str();
}

std::string SweepTable::to_jsonl() const {
  std::string out;
  for (const auto& row : rows) out += row.dump() + "\n";
  return out;
}

namespace {

std::uint32_t whole(double v, const char* what) {
  if (v < 0 || std::floor(v) != v || v > 1e9) throw std::invalid_argument(std::string(what) + " must be a whole number");
  return static_cast<std::uint32_t>(v);
}

void check(const ScenarioConfig& s, double point) {
  try {
    s.validate();
  } catch (const ScenarioError& e) {
    std::ostringstream os;
    os << "sweep point " << point << ": " << e.what();
    throw ConfigError("<sweep>", 0, os.str());
  }
}

std::string fixed(long double v, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << static_cast<double>(v);
  return os.str();
}

nlohmann::ordered_json n_row(const RunConfig& base, double point) {
  ScenarioConfig s = base.effective_scenario();
  s.n = whole(point, "n");
  s.pool_size = std::max(s.pool_size, s.recruited());
  check(s, point);
  auto trace = run_scenario(s);
  auto measured = cost_report(trace, s.schedule);
  CostMode mode = measured.mode;
  // Heavyweight costs scale with the recruited count.
  auto analytic = cost_report(mode, mode == CostMode::heavyweight ? s.recruited() : s.n, s.schedule);
  return {{"n", s.n},
          {"variant", to_string(s.variant)},
          {"mode", to_string(mode)},
          {"outcome", to_string(trace.outcome)},
          {"service_gas", trace.service_gas()},
          {"analytic_gas", analytic.total_gas},
          {"service_usd", format_usd(measured.total_usd)},
          {"analytic_usd", format_usd(analytic.total_usd)},
          {"published_usd", analytic.published_total_usd ? format_usd(*analytic.published_total_usd) : "n/a"},
          {"availability", fixed(availability(s.l, s.t, s.n, s.availability), 6)}};
}

nlohmann::ordered_json availability_row(const ScenarioConfig& s, std::uint32_t trials, std::uint64_t seed) {
  const long double exact = availability(s.l, s.t, s.n, s.availability);
  auto mc = availability_mc(s.l, s.t, s.n, s.availability, trials, seed);
  return {{"l", s.l},
          {"t", s.t},
          {"n", s.n},
          {"A_T", fixed(s.availability, 4)},
          {"analytic", fixed(exact, 8)},
          {"monte_carlo", fixed(mc.estimate, 8)},
          {"sigma", fixed(mc.sigma_at(static_cast<double>(exact)), 8)},
          {"trials", trials}};
}

}  // namespace

SweepTable run_sweep(SweepAxis axis, const std::vector<double>& points, const RunConfig& base,
                     const SweepOptions& options) {
  if (options.trials == 0) throw std::invalid_argument("trials must be positive");
  SweepTable table;
  const ScenarioConfig& s0 = base.scenario;
  std::uint64_t k = 0;
  for (double point : points) {
    const std::uint64_t seed = s0.seed + k++;
    nlohmann::ordered_json row;
    switch (axis) {
      case SweepAxis::n:
        row = n_row(base, point);
        break;
      case SweepAxis::a_t: {
        ScenarioConfig s = s0;
        s.availability = point;
        check(s, point);
        row = availability_row(s, options.trials, seed);
        break;
      }
      case SweepAxis::l: {
        ScenarioConfig s = s0;
        s.l = whole(point, "l");
        s.pool_size = std::max(s.pool_size, s.recruited());
        check(s, point);
        row = availability_row(s, options.trials, seed);
        const double v = s.pool_size;
        const double d = static_cast<double>(s.deposit) / kUnitsPerEther;
        row["sybil_min_deposit"] = s.l >= 2 ? fixed(sybil_min_deposit(s.l, v, d), 4) : "n/a";
        row["optimal_fraction"] = s.l >= 2 ? format_rational(optimal_sybil_fraction(s.l)) : "n/a";
        break;
      }
      case SweepAxis::x: {
        const std::uint32_t x = whole(point, "x");
        const std::uint32_t v = s0.pool_size;
        const double d = static_cast<double>(s0.deposit) / kUnitsPerEther;
        check(s0, point);
        auto est = sybil_monte_carlo(s0.l, s0.t, s0.n, v, x, d, options.trials, seed);
        const long double p = x + v ? static_cast<long double>(x) / (x + v) : 0.0L;
        const bool interior = p > 0 && p < 1;
        row = {{"x", x},
               {"v", v},
               {"p_M", fixed(p, 6)},
               {"analytic_expected_deposit",
                interior ? fixed(sybil_expected_deposit(s0.l, v, d, s0.t, s0.n, p), 4) : "inf"},
               {"empirical_expected_deposit", std::isfinite(est.expected_deposit) ? fixed(est.expected_deposit, 4) : "inf"},
               {"analytic_mean_captured", fixed(s0.n * std::pow(p, static_cast<long double>(s0.l)), 6)},
               {"mean_captured", fixed(est.mean_captured, 6)},
               {"success_rate", fixed(est.success_rate, 6)},
               {"trials", options.trials}};
        break;
      }
      case SweepAxis::bribe: {
        ScenarioConfig s = base.effective_scenario();
        s.seed = s0.seed;
        check(s, point);
        BriberyOptions opt;
        opt.bribe_per_key = static_cast<Amount>(std::llround(point * kUnitsPerEther));
        opt.side_channel = base.adversary.side_channel;
        opt.budget = base.adversary.budget;
        auto out = run_bribery(s, opt);
        row = {{"bribe_per_key", fixed(point, 6)},
               {"side_channel", opt.side_channel},
               {"keys_bought", out.keys_bought},
               {"shares_obtained", out.shares_obtained},
               {"key_recovered", out.key_recovered},
               {"total_spent", format_ether(out.total_spent)},
               {"deposits_forfeited", format_ether(out.deposits_forfeited)},
               {"analytic_cost", fixed(bribery_cost(s.t, s.l, static_cast<long double>(s.deposit) / kUnitsPerEther), 6)},
               {"outcome", to_string(out.trace.outcome)}};
        break;
      }
    }
    if (table.columns.empty())
      for (const auto& [key, _] : row.items()) table.columns.push_back(key);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace sd
