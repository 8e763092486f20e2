#include "silentdelivery/contracts/agent.hpp"

#include <algorithm>

#include "silentdelivery/contracts/supplementary.hpp"
#include "silentdelivery/contracts/switch.hpp"
#include "silentdelivery/crypto/errors.hpp"
#include "silentdelivery/crypto/hash.hpp"

namespace sd {

std::string to_string(MailmanStatus s) {
  switch (s) {
    case MailmanStatus::active: return "active";
    case MailmanStatus::withdrawn: return "withdrawn";
    case MailmanStatus::slashed: return "slashed";
  }
  return "?";
}

std::string to_string(ServiceStatus s) {
  switch (s) {
    case ServiceStatus::pending: return "pending";
    case ServiceStatus::delivered_light: return "delivered_light";
    case ServiceStatus::delivered_heavy: return "delivered_heavy";
    case ServiceStatus::failed: return "failed";
  }
  return "?";
}

std::string to_string(ServiceMode m) { return m == ServiceMode::lightweight ? "lightweight" : "heavyweight"; }

const MailmanRecord* AgentContract::mailman(const Address& a) const {
  auto it = mailmen_.find(a);
  return it == mailmen_.end() ? nullptr : &it->second;
}

const ServiceRecord* AgentContract::service(const Address& switch_addr) const {
  auto it = services_.find(switch_addr);
  return it == services_.end() ? nullptr : &it->second;
}

ServiceRecord& AgentContract::service_mut(const Address& switch_addr) {
  auto it = services_.find(switch_addr);
  if (it == services_.end()) throw Revert("unknown service");
  return it->second;
}

Amount AgentContract::credit(const Address& a) const {
  auto it = credits_.find(a);
  return it == credits_.end() ? 0 : it->second;
}

std::uint64_t AgentContract::unlock_tick(const Ledger& ledger, const Address& a) const {
  const auto* m = mailman(a);
  if (!m) return 0;
  // Settlement of any service starts at the latest five epochs after its
  // time frame, so the deposit stays locked until then.
  std::uint64_t last = 0;
  for (const auto& [frame, _] : m->timeframe_pubkeys)
    last = std::max(last, ledger.tick_of(frame) + 5 * config_.epoch_duration);
  return last;
}

void AgentContract::invoke(CallContext& ctx, std::string_view function, const nlohmann::json& args) {
  if (function == fn::kNewMailman) return new_mailman(ctx, args);
  if (function == fn::kNewService) return new_service(ctx, args);
  if (function == fn::kRecipientReceipt) return recipient_receipt(ctx, args);
  if (function == fn::kProveAgreement) return prove_agreement(ctx, args);
  if (function == fn::kWithdraw) return withdraw(ctx);
  throw Revert("agent has no function '" + std::string(function) + "'");
}

void AgentContract::new_mailman(CallContext& ctx, const nlohmann::json& args) {
  if (is_mailman(ctx.caller())) throw Revert("mailman already registered");
  if (ctx.value() < config_.min_deposit) throw Revert("deposit below the minimum");
  MailmanRecord rec;
  rec.address = ctx.caller();
  rec.whisper_pub = BoxPublicKey::from(abi::bytes32_arg(args, "whisper_pub"));
  for (const auto& entry : abi::array_arg(args, "timeframes")) {
    auto frame = abi::decode_timeframe(entry);
    if (!rec.timeframe_pubkeys.emplace(frame, BoxPublicKey::from(abi::bytes32_arg(entry, "pubkey"))).second)
      throw Revert("duplicate time frame in registration");
  }
  rec.deposit = ctx.value();
  mailmen_.emplace(rec.address, std::move(rec));
  ctx.emit("MailmanRegistered", {{"mailman", ctx.caller().hex()}, {"deposit", ctx.value()}});
}

void AgentContract::new_service(CallContext& ctx, const nlohmann::json& args) {
  ServiceSpec spec;
  spec.timeframe = abi::decode_timeframe(args.contains("timeframe") ? args.at("timeframe") : nlohmann::json{});
  spec.l = abi::u32_arg(args, "l");
  spec.t = abi::u32_arg(args, "t");
  spec.n = abi::u32_arg(args, "n");
  spec.switch_addr = abi::address_arg(args, "switch");
  spec.sup_addr = abi::address_arg(args, "sup");
  spec.recipient = abi::address_arg(args, "recipient");
  spec.receipt_commitment = abi::digest_arg(args, "receipt_hash");
  spec.remuneration = ctx.value();

  if (spec.l < 1) throw Revert("onion depth must be at least 1");
  if (spec.t < 1 || spec.t > spec.n) throw Revert("threshold must satisfy 1 <= t <= n");
  if (spec.remuneration <= 0) throw Revert("remuneration must be escrowed with the call");
  std::uint64_t start;
  try {
    start = ctx.ledger().tick_of(spec.timeframe);
  } catch (const std::invalid_argument&) {
    throw Revert("time frame slot out of range");
  }
  if (start <= ctx.tick()) throw Revert("time frame must be in the future");
  if (services_.count(spec.switch_addr)) throw Revert("switch already bound to a service");
  auto& sw = ctx.contract_as<SwitchContract>(spec.switch_addr);
  if (sw.sender() != ctx.caller()) throw Revert("switch belongs to another sender");
  if (sw.agent() != ctx.self()) throw Revert("switch bound to another agent");
  if (sw.deployed() || spec.sup_addr != SwitchContract::predict_supplementary(spec.switch_addr))
    throw Revert("supplementary address does not match the switch");

  ServiceRecord rec;
  rec.spec = spec;
  rec.sender = ctx.caller();
  rec.start_tick = start;
  rec.epoch_end = start;
  services_.emplace(spec.switch_addr, std::move(rec));
  ctx.emit("ServiceCreated", {{"switch", spec.switch_addr.hex()}});
}

void AgentContract::recipient_receipt(CallContext& ctx, const nlohmann::json& args) {
  auto receipt = abi::bytes32_arg(args, "receipt");
  auto sender = abi::address_arg(args, "sender");
  auto& s = service_mut(abi::address_arg(args, "switch"));
  if (ctx.caller() != s.spec.recipient) throw Revert("caller is not the recipient");
  if (sender != s.sender) throw Revert("sender does not match the service");
  if (hash256(receipt.view()) != s.spec.receipt_commitment) throw Revert("receipt does not match its commitment");
  if (s.spec.status != ServiceStatus::pending) throw Revert("receipt already submitted");
  if (s.epoch == 1) {
    s.spec.status = ServiceStatus::delivered_light;
    enter_epoch(ctx, s, 6);
  } else if (s.epoch == 5) {
    s.spec.status = ServiceStatus::delivered_heavy;
  } else {
    throw Revert("receipts are accepted only in epochs 1 and 5");
  }
  ctx.emit("ReceiptAccepted", {{"switch", s.spec.switch_addr.hex()}, {"epoch", s.epoch}});
}

void AgentContract::prove_agreement(CallContext& ctx, const nlohmann::json& args) {
  auto& s = service_mut(abi::address_arg(args, "switch"));
  if (s.epoch != 6 || s.spec.status != ServiceStatus::delivered_light)
    throw Revert("agreements are proven only after lightweight delivery");
  auto a = abi::decode_agreement(args);
  if (a.index < 1 || a.index > s.spec.recruited()) throw Revert("agreement index out of range");
  Address signer, countersigner;
  try {
    signer = recover_signer(abi::mailman_digest(s.spec.switch_addr, a.index), a.vrs_m);
    countersigner = recover_signer(abi::sender_digest(s.spec.switch_addr, a.index, a.vrs_m), a.vrs_s);
  } catch (const VerificationError&) {
    throw Revert("agreement signature does not verify");
  }
  if (signer != ctx.caller() || !is_mailman(signer)) throw Revert("agreement was not signed by the caller");
  if (countersigner != s.sender) throw Revert("agreement was not countersigned by the sender");
  if (s.proven_indices.count(a.index) || s.provers.count(signer)) throw Revert("agreement already proven");
  s.proven_indices.insert(a.index);
  s.provers.insert(signer);
  credits_[signer] += s.per_claim;
  s.remunerated[signer] += s.per_claim;
  ctx.emit("AgreementProven", {{"switch", s.spec.switch_addr.hex()}, {"index", a.index}});
}

void AgentContract::withdraw(CallContext& ctx) {
  Amount amount = credit(ctx.caller());
  auto it = mailmen_.find(ctx.caller());
  if (it != mailmen_.end() && it->second.status == MailmanStatus::active &&
      ctx.tick() >= unlock_tick(ctx.ledger(), ctx.caller())) {
    amount += it->second.deposit;
    it->second.deposit = 0;
    it->second.status = MailmanStatus::withdrawn;
  }
  if (amount == 0) {
    if (it != mailmen_.end() && it->second.status == MailmanStatus::slashed) throw Revert("deposit was slashed");
    throw Revert("nothing to withdraw");
  }
  credits_.erase(ctx.caller());
  ctx.transfer(ctx.caller(), amount);
  ctx.emit("Withdrawn", {{"account", ctx.caller().hex()}, {"amount", amount}});
}

void AgentContract::mark_heavyweight(CallContext& ctx, const Address& switch_addr) {
  auto& s = service_mut(switch_addr);
  if (ctx.caller() != switch_addr) throw Revert("only the service switch may change mode");
  if (s.mode == ServiceMode::heavyweight) throw Revert("service already in heavyweight mode");
  if (s.epoch != 0 && s.epoch != 2) throw Revert("mode can only be switched in epochs 0 and 2");
  s.mode = ServiceMode::heavyweight;
}

void AgentContract::apply_reports(CallContext& ctx, const Address& switch_addr, const std::vector<Slash>& slashes,
                                  const std::vector<GasClaim>& claims) {
  auto& s = service_mut(switch_addr);
  if (ctx.caller() != s.spec.sup_addr) throw Revert("only the supplementary contract may report");
  if (s.epoch != 4) throw Revert("reports are forwarded only in epoch 4");
  if (s.reports_applied) throw Revert("reports already forwarded");
  s.reports_applied = true;

  Amount pool = 0;
  for (const auto& slash : slashes) {
    auto it = mailmen_.find(slash.accused);
    if (it == mailmen_.end() || s.slashed.count(slash.accused)) continue;
    auto& rec = it->second;
    if (rec.status != MailmanStatus::active) continue;
    Amount seized = rec.deposit;
    rec.deposit = 0;
    rec.status = MailmanStatus::slashed;
    s.slashed.insert(slash.accused);
    Amount reward = 0;
    if (slash.reporter && *slash.reporter != slash.accused && !s.slashed.count(*slash.reporter)) {
      reward = seized / 2;
      credits_[*slash.reporter] += reward;
    }
    pool += seized - reward;
    ctx.emit("Slashed", {{"mailman", slash.accused.hex()},
                         {"index", slash.index},
                         {"reason", slash.reason},
                         {"amount", seized},
                         {"reward", reward}});
  }
  // The rest of the seized deposits refunds the heavyweight-mode gas of
  // parties that were not slashed, oldest transaction first.
  for (const auto& c : claims) {
    if (pool == 0) break;
    if (s.slashed.count(c.payer)) continue;
    Amount refund = std::min(pool, c.fee);
    credits_[c.payer] += refund;
    pool -= refund;
  }
  if (pool > 0) ctx.burn(pool);
}

void AgentContract::enter_epoch(CallContext& ctx, ServiceRecord& s, std::uint32_t epoch) {
  s.epoch = epoch;
  s.epoch_path.push_back(epoch);
  s.epoch_end = std::max(ctx.tick(), s.start_tick) + config_.epoch_duration;
  if (epoch == 6) settle(ctx, s);
}

void AgentContract::settle(CallContext& ctx, ServiceRecord& s) {
  if (s.settled) return;
  s.settled = true;
  if (s.spec.status == ServiceStatus::pending) s.spec.status = ServiceStatus::failed;
  const Amount rem = s.spec.remuneration;
  switch (s.spec.status) {
    case ServiceStatus::delivered_light: {
      s.per_claim = rem / s.spec.recruited();
      Amount dust = rem - s.per_claim * s.spec.recruited();
      if (dust > 0) credits_[s.sender] += dust;
      break;
    }
    case ServiceStatus::delivered_heavy: {
      std::vector<Address> payees;
      if (ctx.is_contract(s.spec.sup_addr)) {
        const auto& sup = ctx.contract_as<SupplementaryContract>(s.spec.sup_addr);
        for (const auto& [_, id] : sup.identities())
          if (!s.slashed.count(id.mailman)) payees.push_back(id.mailman);
      }
      Amount paid = 0;
      if (!payees.empty()) {
        Amount each = rem / static_cast<Amount>(payees.size());
        for (const auto& p : payees) {
          credits_[p] += each;
          s.remunerated[p] += each;
        }
        paid = each * static_cast<Amount>(payees.size());
      }
      if (rem - paid > 0) credits_[s.sender] += rem - paid;
      break;
    }
    default:
      credits_[s.sender] += rem;
      break;
  }
  ctx.emit("ServiceSettled", {{"switch", s.spec.switch_addr.hex()}, {"status", to_string(s.spec.status)}});
}

void AgentContract::on_tick(CallContext& ctx) {
  for (auto& [_, s] : services_) {
    while (s.epoch < 6 && ctx.tick() >= s.epoch_end) {
      switch (s.epoch) {
        case 0:
          enter_epoch(ctx, s, s.mode == ServiceMode::heavyweight ? 2 : 1);
          break;
        case 1:
          enter_epoch(ctx, s, 2);
          break;
        case 2: {
          bool revealed = false;
          if (s.mode == ServiceMode::heavyweight && ctx.is_contract(s.spec.sup_addr))
            revealed = !ctx.contract_as<SupplementaryContract>(s.spec.sup_addr).identities().empty();
          enter_epoch(ctx, s, revealed ? 3 : 6);
          break;
        }
        default:
          enter_epoch(ctx, s, s.epoch + 1);
          break;
      }
    }
  }
}

nlohmann::json AgentContract::state() const {
  nlohmann::json mailmen = nlohmann::json::array();
  for (const auto& [a, m] : mailmen_) {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& [f, pk] : m.timeframe_pubkeys) {
      auto e = abi::encode(f);
      e["pubkey"] = pk.hex();
      frames.push_back(e);
    }
    mailmen.push_back({{"address", a.hex()},
                       {"whisper_pub", m.whisper_pub.hex()},
                       {"timeframes", frames},
                       {"deposit", m.deposit},
                       {"status", to_string(m.status)}});
  }
  nlohmann::json services = nlohmann::json::array();
  for (const auto& [a, s] : services_) {
    nlohmann::json proven = nlohmann::json::array();
    for (auto i : s.proven_indices) proven.push_back(i);
    nlohmann::json slashed = nlohmann::json::array();
    for (const auto& m : s.slashed) slashed.push_back(m.hex());
    services.push_back({{"switch", a.hex()},
                        {"sup", s.spec.sup_addr.hex()},
                        {"sender", s.sender.hex()},
                        {"recipient", s.spec.recipient.hex()},
                        {"timeframe", abi::encode(s.spec.timeframe)},
                        {"l", s.spec.l},
                        {"t", s.spec.t},
                        {"n", s.spec.n},
                        {"receipt_hash", s.spec.receipt_commitment.hex()},
                        {"remuneration", s.spec.remuneration},
                        {"status", to_string(s.spec.status)},
                        {"mode", to_string(s.mode)},
                        {"epoch", s.epoch},
                        {"epoch_path", s.epoch_path},
                        {"per_claim", s.per_claim},
                        {"proven", proven},
                        {"slashed", slashed}});
  }
  nlohmann::json credits = nlohmann::json::object();
  for (const auto& [a, c] : credits_) credits[a.hex()] = c;
  return {{"mailmen", mailmen}, {"services", services}, {"credits", credits}};
}

}  // namespace sd
