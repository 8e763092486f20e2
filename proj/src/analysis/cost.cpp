#include "silentdelivery/analysis/cost.hpp"

#include <map>

namespace sd {

std::string to_string(CostMode m) {
  switch (m) {
    case CostMode::lightweight: return "lightweight";
    case CostMode::heavyweight: return "heavyweight";
    case CostMode::strawman: return "strawman";
  }
  return "?";
}

CostMode parse_cost_mode(std::string_view s) {
  if (s == "lightweight") return CostMode::lightweight;
  if (s == "heavyweight") return CostMode::heavyweight;
  if (s == "strawman") return CostMode::strawman;
  throw std::invalid_argument("unknown cost mode: " + std::string(s));
}

namespace {

struct Call {
  std::string key;
  std::uint64_t items = 0;
};

void add_call(std::map<std::string, CostLine>& lines, const GasSchedule& schedule, const std::string& key,
              std::uint64_t items, std::uint64_t gas) {
  const auto& e = schedule.entry(key);
  auto [it, fresh] = lines.try_emplace(key);
  auto& line = it->second;
  if (fresh) {
    line.function = key;
    line.published_usd = Rational(0);
  }
  ++line.calls;
  line.items += items;
  line.gas += gas;
  line.usd += schedule.usd(gas);
  if (!e.published_usd) {
    line.published_usd.reset();
  } else if (line.published_usd) {
    *line.published_usd += *e.published_usd * static_cast<std::int64_t>(e.per_item > 0 ? items : 1);
  }
}

CostBreakdown assemble(CostMode mode, std::uint32_t n, std::map<std::string, CostLine> lines) {
  CostBreakdown out;
  out.mode = mode;
  out.n = n;
  out.total_usd = 0;
  out.published_total_usd = Rational(0);
  for (auto& [_, line] : lines) {
    out.total_gas += line.gas;
    out.total_usd += line.usd;
    if (line.published_usd && out.published_total_usd)
      *out.published_total_usd += *line.published_usd;
    else
      out.published_total_usd.reset();
    out.lines.push_back(std::move(line));
  }
  return out;
}

std::vector<Call> analytic_calls(CostMode mode, std::uint32_t n) {
  std::vector<Call> calls;
  switch (mode) {
    case CostMode::lightweight:
      calls = {{std::string(fn::kDeploySwitch)}, {std::string(fn::kNewService)}, {std::string(fn::kRecipientReceipt)}};
      break;
    case CostMode::heavyweight:
      calls = {{std::string(fn::kDeploySwitch)},
               {std::string(fn::kNewService)},
               {std::string(fn::kDeploySupplementary)},
               {std::string(fn::kRevealIdentity), n}};
      for (std::uint32_t i = 0; i < n; ++i) calls.push_back({std::string(fn::kRevealPrivkey)});
      calls.push_back({std::string(fn::kRecipientReceipt)});
      break;
    case CostMode::strawman:
      calls = {{std::string(fn::kStrawmanNewService), n}};
      for (std::uint32_t i = 0; i < n; ++i) calls.push_back({std::string(fn::kStrawmanRevealShare)});
      calls.push_back({std::string(fn::kStrawmanRevealReceipt)});
      break;
  }
  return calls;
}

CostBreakdown price(CostMode mode, std::uint32_t n, const GasSchedule& schedule) {
  std::map<std::string, CostLine> lines;
  for (const auto& c : analytic_calls(mode, n)) add_call(lines, schedule, c.key, c.items, schedule.gas_for(c.key, c.items));
  return assemble(mode, n, std::move(lines));
}

// Every mode is linear in n, so two evaluations fix the line.
void fit_line(CostBreakdown& out, const GasSchedule& schedule) {
  auto at0 = price(out.mode, 0, schedule);
  auto at1 = price(out.mode, 1, schedule);
  out.fixed_gas = at0.total_gas;
  out.per_mailman_gas = at1.total_gas - at0.total_gas;
  out.fixed_usd = at0.total_usd;
  out.per_mailman_usd = at1.total_usd - at0.total_usd;
  if (at0.published_total_usd && at1.published_total_usd) {
    out.published_fixed_usd = at0.published_total_usd;
    out.published_per_mailman_usd = *at1.published_total_usd - *at0.published_total_usd;
  }
}

std::uint64_t items_of(const GasEntry& e, std::uint64_t gas) {
  return e.per_item > 0 && gas >= e.base ? (gas - e.base) / e.per_item : 0;
}

}  // namespace

CostBreakdown cost_report(CostMode mode, std::uint32_t n, const GasSchedule& schedule) {
  auto out = price(mode, n, schedule);
  fit_line(out, schedule);
  return out;
}

CostBreakdown cost_report(const ScenarioTrace& trace, const GasSchedule& schedule) {
  const bool strawman = trace.variant == ProtocolVariant::strawman;
  const CostMode mode = strawman ? CostMode::strawman
                                 : (trace.mode == ServiceMode::heavyweight ? CostMode::heavyweight : CostMode::lightweight);
  std::map<std::string, CostLine> lines;
  std::uint64_t all_gas = 0;
  Amount all_fee = 0;
  for (const auto& r : trace.receipts) {
    const std::string key = strawman ? "strawman." + r.function : r.function;
    const auto& e = schedule.entry(key);
    all_gas += r.gas_used;
    all_fee += r.fee;
    if (is_service_phase(r.phase)) add_call(lines, schedule, key, items_of(e, r.gas_used), r.gas_used);
  }
  const auto n = static_cast<std::uint32_t>(trace.recruited.size());
  auto out = assemble(mode, n, std::move(lines));
  out.all_calls_gas = all_gas;
  out.all_calls_fee = all_fee;
  fit_line(out, schedule);
  return out;
}

nlohmann::json CostBreakdown::to_json() const {
  auto usd = [](const Rational& r) { return nlohmann::json{{"display", format_usd(r)}, {"exact", format_rational(r)}}; };
  auto opt_usd = [&](const std::optional<Rational>& r) { return r ? usd(*r) : nlohmann::json(nullptr); };
  auto ls = nlohmann::json::array();
  for (const auto& l : lines)
    ls.push_back({{"function", l.function},
                  {"calls", l.calls},
                  {"items", l.items},
                  {"gas", l.gas},
                  {"usd", usd(l.usd)},
                  {"published_usd", opt_usd(l.published_usd)}});
  nlohmann::json j{{"mode", to_string(mode)},
                   {"n", n},
                   {"lines", ls},
                   {"total_gas", total_gas},
                   {"total_usd", usd(total_usd)},
                   {"published_total_usd", opt_usd(published_total_usd)},
                   {"fixed_gas", fixed_gas},
                   {"per_mailman_gas", per_mailman_gas},
                   {"fixed_usd", usd(fixed_usd)},
                   {"per_mailman_usd", usd(per_mailman_usd)},
                   {"published_fixed_usd", opt_usd(published_fixed_usd)},
                   {"published_per_mailman_usd", opt_usd(published_per_mailman_usd)}};
  if (all_calls_gas) {
    j["all_calls_gas"] = all_calls_gas;
    j["all_calls_fee"] = all_calls_fee;
  }
  return j;
}

}  // namespace sd
