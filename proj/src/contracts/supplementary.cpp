#include "silentdelivery/contracts/supplementary.hpp"

#include <set>

#include "silentdelivery/crypto/errors.hpp"

namespace sd {

namespace {
bool pairs_with(const MailmanRecord* m, const TimeFrame& frame, const BoxSecretKey& privkey) {
  if (!m) return false;
  auto it = m->timeframe_pubkeys.find(frame);
  return it != m->timeframe_pubkeys.end() && box_pairs(privkey, it->second);
}
}  // namespace

void SupplementaryContract::invoke(CallContext& ctx, std::string_view function, const nlohmann::json& args) {
  if (function == fn::kReportPremature) report_premature(ctx, args);
  else if (function == fn::kRevealIdentity) reveal_identity(ctx, args);
  else if (function == fn::kRevealPrivkey) reveal_privkey(ctx, args);
  else if (function == fn::kReportAbsent) report_absent(ctx, args);
  else if (function == fn::kReportFake) report_fake(ctx, args);
  else if (function == fn::kInformAgent) inform_agent(ctx);
  else throw Revert("supplementary has no function '" + std::string(function) + "'");
}

std::uint64_t SupplementaryContract::gas_items(std::string_view function, const nlohmann::json& args) const {
  if (function != fn::kRevealIdentity) return 0;
  auto it = args.find("agreements");
  return it != args.end() && it->is_array() ? it->size() : 0;
}

std::optional<std::uint32_t> SupplementaryContract::index_of(const Address& mailman) const {
  for (const auto& [i, id] : identities_)
    if (id.mailman == mailman) return i;
  return std::nullopt;
}

const ServiceRecord& SupplementaryContract::service(CallContext& ctx) const {
  const auto* s = ctx.contract_as<AgentContract>(agent_).service(switch_);
  if (!s) throw Revert("unknown service");
  return *s;
}

void SupplementaryContract::require_epoch(CallContext& ctx, std::uint32_t epoch) const {
  if (service(ctx).epoch != epoch) throw Revert("call not allowed in epoch " + std::to_string(service(ctx).epoch));
}

void SupplementaryContract::require_mailman(CallContext& ctx) const {
  if (!ctx.contract_as<AgentContract>(agent_).is_mailman(ctx.caller())) throw Revert("caller is not a mailman");
}

bool SupplementaryContract::accused(std::uint32_t index) const {
  for (const auto& r : absent_)
    if (r.index == index) return true;
  for (const auto& r : fake_)
    if (r.index == index) return true;
  return false;
}

void SupplementaryContract::report_premature(CallContext& ctx, const nlohmann::json& args) {
  require_epoch(ctx, 0);
  require_mailman(ctx);
  auto index = abi::u32_arg(args, "index");
  auto privkey = BoxSecretKey::from(abi::bytes32_arg(args, "privkey"));
  if (index < 1 || index > service(ctx).spec.recruited()) throw Revert("index out of range");
  for (const auto& r : premature_)
    if (r.index == index && r.privkey == privkey) throw Revert("key already reported");
  premature_.push_back({index, ctx.caller(), privkey});
  gas_log_.push_back({ctx.caller(), ctx.fee(), std::string(fn::kReportPremature)});
}

void SupplementaryContract::reveal_identity(CallContext& ctx, const nlohmann::json& args) {
  require_epoch(ctx, 2);
  const auto& s = service(ctx);
  const auto& agent = ctx.contract_as<AgentContract>(agent_);
  const auto& list = abi::array_arg(args, "agreements");
  if (list.empty()) throw Revert("no agreements given");

  std::map<std::uint32_t, RevealedIdentity> fresh;
  std::set<Address> seen;
  for (const auto& [_, id] : identities_) seen.insert(id.mailman);
  for (const auto& entry : list) {
    auto a = abi::decode_agreement(entry);
    if (a.index < 1 || a.index > s.spec.recruited()) throw Revert("agreement index out of range");
    if (identities_.count(a.index) || fresh.count(a.index)) throw Revert("identity already revealed");
    Address mailman;
    try {
      mailman = recover_signer(abi::mailman_digest(switch_, a.index), a.vrs_m);
      if (recover_signer(abi::sender_digest(switch_, a.index, a.vrs_m), a.vrs_s) != s.sender)
        throw Revert("agreement was not countersigned by the sender");
    } catch (const VerificationError&) {
      throw Revert("agreement signature does not verify");
    }
    if (!agent.is_mailman(mailman)) throw Revert("agreement signer is not a mailman");
    if (!seen.insert(mailman).second) throw Revert("mailman appears under two indices");
    fresh.emplace(a.index, RevealedIdentity{a, mailman});
  }
  identities_.merge(fresh);
  gas_log_.push_back({ctx.caller(), ctx.fee(), std::string(fn::kRevealIdentity)});
  ctx.emit("IdentitiesRevealed", {{"count", list.size()}});
}

void SupplementaryContract::reveal_privkey(CallContext& ctx, const nlohmann::json& args) {
  require_epoch(ctx, 3);
  auto index = abi::u32_arg(args, "index");
  auto privkey = BoxSecretKey::from(abi::bytes32_arg(args, "privkey"));
  auto it = identities_.find(index);
  if (it == identities_.end()) throw Revert("no identity revealed for index");
  if (it->second.mailman != ctx.caller()) throw Revert("caller does not hold this index");
  if (privkeys_.count(index)) throw Revert("privkey already revealed");
  const auto* m = ctx.contract_as<AgentContract>(agent_).mailman(ctx.caller());
  bool matches = pairs_with(m, service(ctx).spec.timeframe, privkey);
  privkeys_.emplace(index, RevealedPrivkey{privkey, matches});
  gas_log_.push_back({ctx.caller(), ctx.fee(), std::string(fn::kRevealPrivkey)});
}

void SupplementaryContract::report_absent(CallContext& ctx, const nlohmann::json& args) {
  require_epoch(ctx, 4);
  require_mailman(ctx);
  auto index = abi::u32_arg(args, "index");
  auto it = identities_.find(index);
  if (it == identities_.end()) throw Revert("no identity revealed for index");
  if (it->second.mailman == ctx.caller()) throw Revert("a mailman cannot accuse itself");
  if (privkeys_.count(index)) throw Revert("privkey was revealed for index");
  if (accused(index)) throw Revert("index already reported");
  absent_.push_back({index, ctx.caller()});
  gas_log_.push_back({ctx.caller(), ctx.fee(), std::string(fn::kReportAbsent)});
}

void SupplementaryContract::report_fake(CallContext& ctx, const nlohmann::json& args) {
  require_epoch(ctx, 4);
  require_mailman(ctx);
  auto index = abi::u32_arg(args, "index");
  auto it = privkeys_.find(index);
  if (it == privkeys_.end()) throw Revert("no privkey revealed for index");
  if (it->second.matches) throw Revert("revealed privkey is genuine");
  if (identities_.at(index).mailman == ctx.caller()) throw Revert("a mailman cannot accuse itself");
  if (accused(index)) throw Revert("index already reported");
  fake_.push_back({index, ctx.caller()});
  gas_log_.push_back({ctx.caller(), ctx.fee(), std::string(fn::kReportFake)});
}

void SupplementaryContract::inform_agent(CallContext& ctx) {
  require_epoch(ctx, 4);
  if (informed_) throw Revert("agent already informed");
  if (premature_.empty() && absent_.empty() && fake_.empty()) throw Revert("nothing to report");
  informed_ = true;
  gas_log_.push_back({ctx.caller(), ctx.fee(), std::string(fn::kInformAgent)});

  auto& agent = ctx.contract_as<AgentContract>(agent_);
  const auto& frame = service(ctx).spec.timeframe;
  std::vector<Slash> slashes;
  for (const auto& r : premature_) {
    auto it = identities_.find(r.index);
    // Without a revealed identity the report cannot be checked either way.
    if (it == identities_.end()) continue;
    if (pairs_with(agent.mailman(it->second.mailman), frame, r.privkey))
      slashes.push_back({it->second.mailman, r.reporter, "premature", r.index});
    else
      slashes.push_back({r.reporter, std::nullopt, "false_report", r.index});
  }
  for (const auto& r : absent_) slashes.push_back({identities_.at(r.index).mailman, r.reporter, "absent", r.index});
  for (const auto& r : fake_) slashes.push_back({identities_.at(r.index).mailman, r.reporter, "fake", r.index});
  auto agent_ctx = ctx.call_into(agent_);
  agent.apply_reports(agent_ctx, switch_, slashes, gas_log_);
}

nlohmann::json SupplementaryContract::state() const {
  nlohmann::json premature = nlohmann::json::array();
  for (const auto& r : premature_)
    premature.push_back({{"index", r.index}, {"reporter", r.reporter.hex()}, {"privkey", r.privkey.hex()}});
  nlohmann::json identities = nlohmann::json::array();
  for (const auto& [i, id] : identities_) {
    auto e = abi::encode(id.agreement);
    e["mailman"] = id.mailman.hex();
    identities.push_back(e);
  }
  nlohmann::json privkeys = nlohmann::json::array();
  for (const auto& [i, p] : privkeys_)
    privkeys.push_back({{"index", i}, {"privkey", p.privkey.hex()}, {"matches", p.matches}});
  auto accusations = [](const std::vector<AccusationReport>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : v) out.push_back({{"index", r.index}, {"reporter", r.reporter.hex()}});
    return out;
  };
  return {{"agent", agent_.hex()},
          {"switch", switch_.hex()},
          {"deployed_by", deployed_by_.hex()},
          {"premature_reports", premature},
          {"identities", identities},
          {"privkeys", privkeys},
          {"absent_reports", accusations(absent_)},
          {"fake_reports", accusations(fake_)},
          {"informed", informed_}};
}

}  // namespace sd
