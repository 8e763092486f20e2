#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "silentdelivery/actors/driver.hpp"
#include "silentdelivery/adversary/attacks.hpp"
#include "silentdelivery/analysis/availability.hpp"
#include "silentdelivery/analysis/cost.hpp"
#include "silentdelivery/analysis/sybil.hpp"
#include "silentdelivery/config/config_file.hpp"
#include "silentdelivery/config/sweep.hpp"

namespace fs = std::filesystem;
using namespace sd;

namespace {

// Exit codes: 0 terminal state reached, 1 internal error, 2 bad input.
constexpr int kBadInput = 2;

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

RunConfig load(const std::string& path, std::optional<std::uint64_t> seed) {
  RunConfig rc = path.empty() ? parse_config("", "<defaults>") : load_config(path);
  if (!rc.explicit_schedule) rc.scenario.schedule = GasSchedule::from_environment();
  if (seed) rc.scenario.seed = *seed;
  return rc;
}

std::string calls_csv(const ScenarioTrace& trace) {
  std::ostringstream os;
  os << "seq,tick,phase,function,success,gas,fee,usd\n";
  for (const auto& r : trace.receipts)
    os << r.seq << "," << r.tick << "," << r.phase << "," << r.function << "," << (r.success ? 1 : 0) << ","
       << r.gas_used << "," << r.fee << "," << format_rational(r.usd) << "\n";
  return os.str();
}

void print_summary(const ScenarioTrace& trace, const CostBreakdown& cost) {
  std::cout << "outcome:      " << to_string(trace.outcome) << "\n";
  std::cout << "mode:         " << to_string(cost.mode) << "\n";
  std::cout << "epoch path:  ";
  for (auto e : trace.epoch_path) std::cout << " " << e;
  std::cout << "\n";
  std::cout << "service gas:  " << cost.total_gas << "\n";
  std::cout << "service cost: " << format_usd(cost.total_usd) << " (" << format_rational(cost.total_usd)
            << " at the schedule's rates)";
  if (cost.published_total_usd) std::cout << "; published per-call figures sum to " << format_usd(*cost.published_total_usd);
  std::cout << "\n";
  std::cout << "restored:     " << (trace.info_matches ? "yes" : "no") << "\n";
  std::cout << "slashes:      " << trace.slashes.size() << "\n";
  for (const auto& s : trace.slashes)
    std::cout << "  " << s.mailman.hex() << " " << s.reason << " " << format_ether(s.amount) << " ether\n";
  std::cout << "conserved:    " << (trace.conserved ? "yes" : "no") << "\n";
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out_dir,
            const std::string& format) {
  RunConfig rc = load(config, seed);
  const ScenarioConfig scenario = rc.effective_scenario();
  nlohmann::json summary{{"config", rc.to_json()}};
  ScenarioTrace trace;
  switch (rc.adversary.attack) {
    case AttackKind::none:
      trace = run_scenario(scenario);
      break;
    case AttackKind::bribery: {
      BriberyOptions opt{rc.adversary.bribe_per_key, rc.adversary.side_channel, rc.adversary.budget};
      auto out = run_bribery(scenario, opt);
      summary["attack"] = {{"kind", "bribery"},
                           {"keys_bought", out.keys_bought},
                           {"offers", out.offers},
                           {"shares_obtained", out.shares_obtained},
                           {"key_recovered", out.key_recovered},
                           {"total_spent", format_ether(out.total_spent)},
                           {"deposits_forfeited", format_ether(out.deposits_forfeited)}};
      std::cout << "bribery: " << out.keys_bought << " keys bought for " << format_ether(out.total_spent)
                << " ether, " << out.shares_obtained << " shares, key " << (out.key_recovered ? "recovered" : "safe")
                << "\n";
      trace = std::move(out.trace);
      break;
    }
    case AttackKind::sybil: {
      auto out = run_sybil(scenario, rc.adversary.sybil_x);
      summary["attack"] = {{"kind", "sybil"},
                           {"x", rc.adversary.sybil_x},
                           {"shares_obtained", out.shares_obtained},
                           {"key_recovered", out.key_recovered},
                           {"total_spent", format_ether(out.total_spent)}};
      std::cout << "sybil: " << rc.adversary.sybil_x << " identities, " << out.shares_obtained << " shares captured, key "
                << (out.key_recovered ? "recovered" : "safe") << "\n";
      fs::path sp = rc.output.summary ? fs::path(*rc.output.summary) : fs::path(out_dir) / "summary.json";
      write_file(sp, summary.dump(2) + "\n");
      return 0;
    }
  }
  auto cost = cost_report(trace, scenario.schedule);
  summary["run"] = summary_json(trace);
  summary["cost"] = cost.to_json();
  print_summary(trace, cost);

  const fs::path dir(out_dir);
  fs::path trace_path = rc.output.trace ? fs::path(*rc.output.trace)
                                        : dir / (format == "csv" ? "calls.csv" : "trace.jsonl");
  fs::path summary_path = rc.output.summary ? fs::path(*rc.output.summary) : dir / "summary.json";
  write_file(trace_path, format == "csv" ? calls_csv(trace) : trace_jsonl(trace));
  write_file(summary_path, summary.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const std::string& config, std::optional<std::uint64_t> seed, const std::string& axis,
              const std::string& range, std::uint32_t trials, const std::string& format, const std::string& out) {
  RunConfig rc = load(config, seed);
  auto table = run_sweep(parse_sweep_axis(axis), parse_sweep_range(range), rc, SweepOptions{trials});
  const std::string text = format == "jsonl" ? table.to_jsonl() : table.to_csv();
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

std::string num(long double v, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << static_cast<double>(v);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sdsim: timed information delivery simulator"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::string run_out;
  std::string sweep_out;
  std::string run_format = "jsonl";
  std::string sweep_format = "csv";
  std::string axis;
  std::string range;
  std::uint32_t trials = 10000;

  auto* run = app.add_subcommand("run", "Run one scenario and write its trace and summary");
  run->add_option("--config", config, "Scenario file (YAML)")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", run_out, "Output directory")->default_val(".");
  run->add_option("--format", run_format, "Trace format")->check(CLI::IsMember({"csv", "jsonl"}))->default_val("jsonl");

  auto* sweep = app.add_subcommand("sweep", "Evaluate a scenario along one parameter axis");
  sweep->add_option("--config", config, "Base scenario file (YAML)")->check(CLI::ExistingFile);
  sweep->add_option("--seed", seed, "Override the scenario seed");
  sweep->add_option("--sweep-axis", axis, "n, A_T, l, x or bribe")->required();
  sweep->add_option("--sweep-range", range, "start:stop:step or a comma-separated list")->required();
  sweep->add_option("--trials", trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
  sweep->add_option("--format", sweep_format, "Table format")->check(CLI::IsMember({"csv", "jsonl"}))->default_val("csv");
  sweep->add_option("--out", sweep_out, "Output file (default: standard output)");

  auto* analyze = app.add_subcommand("analyze", "Print closed-form values");
  analyze->require_subcommand(1);
  std::uint32_t l = 0, t = 0, n = 0;
  double a_t = 0, v = 0, d = 0;
  std::string mode;
  auto* av = analyze->add_subcommand("availability", "Service availability for l t n A_T");
  av->add_option("l", l)->required();
  av->add_option("t", t)->required();
  av->add_option("n", n)->required();
  av->add_option("A_T", a_t)->required();
  av->add_option("--trials", trials, "Also run a Monte Carlo check with this many trials");
  auto* co = analyze->add_subcommand("cost", "Cost of a completed service: MODE n");
  co->add_option("mode", mode)->required()->check(CLI::IsMember({"lightweight", "heavyweight", "strawman"}));
  co->add_option("n", n)->required();
  auto* sy = analyze->add_subcommand("sybil", "Minimum Sybil deposit for l v d");
  sy->add_option("l", l)->required();
  sy->add_option("v", v)->required();
  sy->add_option("d", d)->required();
  auto* br = analyze->add_subcommand("bribery", "Bribery cost bound for t l d");
  br->add_option("t", t)->required();
  br->add_option("l", l)->required();
  br->add_option("d", d)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config, seed, run_out, run_format);
    if (sweep->parsed()) return cmd_sweep(config, seed, axis, range, trials, sweep_format, sweep_out);
    if (av->parsed()) {
      const auto exact = availability(l, t, n, a_t);
      std::cout << "availability " << num(exact, 10) << "\n";
      if (av->count("--trials")) {
        auto mc = availability_mc(l, t, n, a_t, trials, 1);
        std::cout << "monte_carlo " << num(mc.estimate, 10) << " sigma " << num(mc.sigma_at(double(exact)), 3) << "\n";
      }
      return 0;
    }
    if (co->parsed()) {
      const auto schedule = GasSchedule::from_environment();
      auto c = cost_report(parse_cost_mode(mode), n, schedule);
      std::cout << to_string(c.mode) << " n=" << n << ": gas " << c.total_gas << ", " << format_usd(c.total_usd);
      if (c.published_total_usd) std::cout << " (published figures: " << format_usd(*c.published_total_usd) << ")";
      std::cout << "\nmodel: " << c.fixed_gas << " + " << c.per_mailman_gas << "·n gas = " << num(to_double(c.fixed_usd), 8)
                << " + " << num(to_double(c.per_mailman_usd), 8) << "·n USD";
      if (c.published_fixed_usd)
        std::cout << " (published: " << format_usd(*c.published_fixed_usd) << " + "
                  << format_usd(*c.published_per_mailman_usd) << "·n)";
      std::cout << "\n";
      return 0;
    }
    if (sy->parsed()) {
      const auto fraction = optimal_sybil_fraction(l);
      const auto min_deposit = sybil_min_deposit(l, v, d);
      std::cout << "min_deposit " << num(min_deposit, 12) << "\n";
      std::cout << "optimal_fraction " << format_rational(fraction) << "\n";
      std::cout << "optimal_x " << num(optimal_sybil_count(l, v), 12) << "\n";
      return 0;
    }
    if (br->parsed()) {
      std::cout << "bribery_cost " << num(bribery_cost(t, l, d), 12) << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const DegenerateCaseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
