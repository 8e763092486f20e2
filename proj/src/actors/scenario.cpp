#include "silentdelivery/actors/scenario.hpp"

#include <array>
#include <utility>

namespace sd {

namespace {
constexpr std::array<std::pair<FaultPolicy, std::string_view>, 8> kPolicyNames{{
    {FaultPolicy::honest, "honest"},
    {FaultPolicy::premature, "premature"},
    {FaultPolicy::absent, "absent"},
    {FaultPolicy::fake, "fake"},
    {FaultPolicy::withhold_light, "withhold_light"},
    {FaultPolicy::false_reporter, "false_reporter"},
    {FaultPolicy::briberable, "briberable"},
    {FaultPolicy::refuse, "refuse"},
}};
}  // namespace

std::string to_string(FaultPolicy p) {
  for (const auto& [policy, name] : kPolicyNames)
    if (policy == p) return std::string(name);
  return "?";
}

FaultPolicy parse_fault_policy(std::string_view name) {
  for (const auto& [policy, n] : kPolicyNames)
    if (n == name) return policy;
  throw ScenarioError("unknown fault policy '" + std::string(name) + "'");
}

std::string to_string(ProtocolVariant v) { return v == ProtocolVariant::silent ? "silent" : "strawman"; }

void ScenarioConfig::validate() const {
  if (l < 1) throw ScenarioError("l", "l must be at least 1");
  if (t < 1 || t > n) throw ScenarioError("t", "threshold must satisfy 1 <= t <= n");
  if (pool_size < recruited())
    throw ScenarioError("pool_size", "pool of " + std::to_string(pool_size) + " mailmen cannot supply " +
                        std::to_string(recruited()) + " recruits");
  if (deposit < effective_min_deposit()) throw ScenarioError("deposit", "deposit below the minimum deposit");
  if (deposit <= 0) throw ScenarioError("deposit", "deposit must be positive");
  if (remuneration <= 0) throw ScenarioError("remuneration", "remuneration must be positive");
  if (!(availability >= 0.0 && availability <= 1.0)) throw ScenarioError("availability", "availability must lie in [0, 1]");
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0))
    throw ScenarioError("drop_probability", "drop probability must lie in [0, 1]");
  if (slots_per_day < 1) throw ScenarioError("slots_per_day", "slots_per_day must be positive");
  if (epoch_duration < 1) throw ScenarioError("epoch_duration", "epoch_duration must be positive");
  if (lead_ticks < 2) throw ScenarioError("lead_ticks", "lead_ticks must leave room for setup and epoch 0");
  if (mailman_funds < deposit) throw ScenarioError("mailman_funds", "mailman funds do not cover the deposit");
  if (sender_funds < remuneration) throw ScenarioError("sender_funds", "sender funds do not cover the remuneration");
  for (const auto& [i, _] : pool_faults)
    if (i >= pool_size) throw ScenarioError("faults", "fault names pool index " + std::to_string(i) + " outside the pool");
  for (const auto& [p, _] : recruit_faults)
    if (p < 1 || p > recruited()) throw ScenarioError("recruit_faults", "fault names position " + std::to_string(p) + " outside 1..m");
  if (selection) {
    if (selection->size() != recruited()) throw ScenarioError("selection", "selection must list exactly m pool indices");
    std::vector<bool> seen(pool_size, false);
    for (auto i : *selection) {
      if (i >= pool_size) throw ScenarioError("selection", "selection names an index outside the pool");
      if (seen[i]) throw ScenarioError("selection", "selection repeats a pool index");
      seen[i] = true;
    }
  }
}

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json pf = nlohmann::json::object();
  for (const auto& [i, p] : pool_faults) pf[std::to_string(i)] = to_string(p);
  nlohmann::json rf = nlohmann::json::object();
  for (const auto& [i, p] : recruit_faults) rf[std::to_string(i)] = to_string(p);
  return {{"seed", seed},
          {"variant", to_string(variant)},
          {"pool_size", pool_size},
          {"l", l},
          {"t", t},
          {"n", n},
          {"deposit", format_ether(deposit)},
          {"remuneration", format_ether(remuneration)},
          {"min_deposit", format_ether(effective_min_deposit())},
          {"availability", availability},
          {"drop_probability", drop_probability},
          {"private_metadata_visible", private_metadata_visible},
          {"epoch_duration", epoch_duration},
          {"lead_ticks", lead_ticks},
          {"pool_faults", pf},
          {"recruit_faults", rf},
          {"selection", selection ? nlohmann::json(*selection) : nlohmann::json(nullptr)}};
}

bool is_service_phase(std::string_view phase) {
  return phase == "send" || (phase.size() == 7 && phase.substr(0, 6) == "epoch-" && phase[6] >= '0' && phase[6] <= '5');
}

std::uint64_t ScenarioTrace::service_gas() const {
  std::uint64_t g = 0;
  for (const auto& r : receipts)
    if (is_service_phase(r.phase)) g += r.gas_used;
  return g;
}

Rational ScenarioTrace::service_usd() const {
  Rational usd = 0;
  for (const auto& r : receipts)
    if (is_service_phase(r.phase)) usd += r.usd;
  return usd;
}

std::uint64_t ScenarioTrace::total_gas() const {
  std::uint64_t g = 0;
  for (const auto& r : receipts) g += r.gas_used;
  return g;
}

bool ScenarioTrace::misbehaved(const Address& mailman) const {
  for (const auto& m : misbehavior)
    if (m.mailman == mailman) return true;
  return false;
}

Amount ScenarioTrace::payoff(const Address& a) const {
  auto fin = final_balances.find(a);
  auto ini = initial_balances.find(a);
  return (fin == final_balances.end() ? 0 : fin->second) - (ini == initial_balances.end() ? 0 : ini->second);
}

nlohmann::json summary_json(const ScenarioTrace& trace) {
  nlohmann::json slashes = nlohmann::json::array();
  for (const auto& s : trace.slashes)
    slashes.push_back({{"mailman", s.mailman.hex()}, {"reason", s.reason}, {"amount", s.amount}, {"reward", s.reward}});
  nlohmann::json misbehavior = nlohmann::json::array();
  for (const auto& m : trace.misbehavior)
    misbehavior.push_back({{"tick", m.tick}, {"mailman", m.mailman.hex()}, {"kind", m.kind}});
  nlohmann::json recruited = nlohmann::json::array();
  for (const auto& a : trace.recruited) recruited.push_back(a.hex());
  return {{"record", "summary"},
          {"seed", trace.seed},
          {"variant", to_string(trace.variant)},
          {"outcome", to_string(trace.outcome)},
          {"mode", to_string(trace.mode)},
          {"epoch_path", trace.epoch_path},
          {"recruited", recruited},
          {"recipient_restored", trace.recipient_restored},
          {"info_matches", trace.info_matches},
          {"resend_requests", trace.resend_requests},
          {"refusals", trace.refusals},
          {"service_gas", trace.service_gas()},
          {"service_usd", format_usd(trace.service_usd())},
          {"service_usd_exact", format_rational(trace.service_usd())},
          {"total_gas", trace.total_gas()},
          {"slashes", slashes},
          {"misbehavior", misbehavior},
          {"delivery_state_hash", trace.delivery_state_hash.hex()},
          {"final_state_hash", trace.final_state_hash.hex()},
          {"minted", trace.minted},
          {"gas_sink", trace.gas_sink},
          {"burned", trace.burned},
          {"conserved", trace.conserved}};
}

std::string trace_jsonl(const ScenarioTrace& trace) {
  std::string out;
  for (const auto& r : trace.receipts) {
    auto j = receipt_to_json(r);
    j["record"] = "receipt";
    out += j.dump() + "\n";
  }
  for (const auto& t : trace.transfers) {
    nlohmann::json j{{"record", "transfer"},
                     {"tick", t.tick},
                     {"from", t.from.hex()},
                     {"to", t.to.hex()},
                     {"amount", t.amount},
                     {"memo", t.memo}};
    out += j.dump() + "\n";
  }
  for (const auto& m : trace.messages) {
    auto j = message_to_json(m);
    j["record"] = "message";
    out += j.dump() + "\n";
  }
  out += summary_json(trace).dump() + "\n";
  return out;
}

}  // namespace sd
