#include "silentdelivery/contracts/strawman.hpp"

#include "silentdelivery/crypto/hash.hpp"

namespace sd {

const MailmanRecord* StrawmanContract::mailman(const Address& a) const {
  auto it = mailmen_.find(a);
  return it == mailmen_.end() ? nullptr : &it->second;
}

Amount StrawmanContract::credit(const Address& a) const {
  auto it = credits_.find(a);
  return it == credits_.end() ? 0 : it->second;
}

std::uint64_t StrawmanContract::gas_items(std::string_view function, const nlohmann::json& args) const {
  if (function != fn::kNewService) return 0;
  auto it = args.find("mailmen");
  return it != args.end() && it->is_array() ? it->size() : 0;
}

StrawmanService& StrawmanContract::service_arg(const nlohmann::json& args) {
  auto id = abi::u32_arg(args, "service");
  if (id >= services_.size()) throw Revert("unknown service");
  return services_[id];
}

void StrawmanContract::invoke(CallContext& ctx, std::string_view function, const nlohmann::json& args) {
  if (function == fn::kNewMailman) {
    if (mailmen_.count(ctx.caller())) throw Revert("mailman already registered");
    if (ctx.value() < config_.min_deposit) throw Revert("deposit below the minimum");
    MailmanRecord rec;
    rec.address = ctx.caller();
    rec.whisper_pub = BoxPublicKey::from(abi::bytes32_arg(args, "whisper_pub"));
    rec.deposit = ctx.value();
    mailmen_.emplace(rec.address, rec);
    return;
  }

  if (function == fn::kNewService) {
    StrawmanService s;
    s.sender = ctx.caller();
    s.recipient = abi::address_arg(args, "recipient");
    s.timeframe = abi::decode_timeframe(args.contains("timeframe") ? args.at("timeframe") : nlohmann::json{});
    s.t = abi::u32_arg(args, "t");
    s.n = abi::u32_arg(args, "n");
    s.receipt_commitment = abi::digest_arg(args, "receipt_hash");
    s.remuneration = ctx.value();
    if (s.t < 1 || s.t > s.n) throw Revert("threshold must satisfy 1 <= t <= n");
    if (s.remuneration <= 0) throw Revert("remuneration must be escrowed with the call");
    try {
      s.start_tick = ctx.ledger().tick_of(s.timeframe);
    } catch (const std::invalid_argument&) {
      throw Revert("time frame slot out of range");
    }
    if (s.start_tick <= ctx.tick()) throw Revert("time frame must be in the future");
    const auto& list = abi::array_arg(args, "mailmen");
    if (list.size() != s.n) throw Revert("one mailman per share is required");
    std::set<Address> seen;
    for (const auto& e : list) {
      StrawmanAssignment a{abi::address_arg(e, "mailman"), abi::digest_arg(e, "share_hash")};
      if (!mailmen_.count(a.mailman)) throw Revert("listed address is not a mailman");
      if (!seen.insert(a.mailman).second) throw Revert("mailman listed twice");
      s.assignments.push_back(a);
    }
    services_.push_back(std::move(s));
    ctx.emit("ServiceCreated", {{"service", services_.size() - 1}});
    return;
  }

  if (function == fn::kReportPremature) {
    auto& s = service_arg(args);
    if (ctx.tick() >= s.start_tick) throw Revert("time frame already reached");
    auto h = hash256(abi::bytes_arg(args, "share"));
    for (const auto& a : s.assignments) {
      if (a.share_hash != h) continue;
      auto& rec = mailmen_.at(a.mailman);
      if (rec.status != MailmanStatus::active || s.slashed.count(a.mailman)) throw Revert("mailman already slashed");
      // The deposit goes half to the informer and half to the sender.
      Amount seized = rec.deposit;
      rec.deposit = 0;
      rec.status = MailmanStatus::slashed;
      s.slashed.insert(a.mailman);
      credits_[ctx.caller()] += seized / 2;
      credits_[s.sender] += seized - seized / 2;
      ctx.emit("Slashed", {{"mailman", a.mailman.hex()}, {"amount", seized}});
      return;
    }
    throw Revert("share matches no commitment");
  }

  if (function == fn::kRevealShare) {
    auto& s = service_arg(args);
    if (ctx.tick() < s.start_tick || ctx.tick() >= s.start_tick + config_.epoch_duration)
      throw Revert("shares are revealed only during the time frame");
    auto h = hash256(abi::bytes_arg(args, "share"));
    for (std::uint32_t i = 0; i < s.assignments.size(); ++i) {
      if (s.assignments[i].mailman != ctx.caller()) continue;
      if (s.assignments[i].share_hash != h) throw Revert("share does not match its commitment");
      if (!s.revealed.insert(i).second) throw Revert("share already revealed");
      return;
    }
    throw Revert("caller holds no share of this service");
  }

  if (function == fn::kRevealReceipt) {
    auto& s = service_arg(args);
    if (ctx.tick() < s.start_tick || ctx.tick() >= s.start_tick + 2 * config_.epoch_duration)
      throw Revert("receipt window closed");
    if (ctx.caller() != s.recipient) throw Revert("caller is not the recipient");
    if (hash256(abi::bytes32_arg(args, "receipt").view()) != s.receipt_commitment)
      throw Revert("receipt does not match its commitment");
    if (s.receipt_revealed) throw Revert("receipt already submitted");
    s.receipt_revealed = true;
    return;
  }

  if (function == fn::kWithdraw) {
    Amount amount = credit(ctx.caller());
    auto it = mailmen_.find(ctx.caller());
    if (it != mailmen_.end() && it->second.status == MailmanStatus::active) {
      bool locked = false;
      for (const auto& s : services_)
        for (const auto& a : s.assignments)
          if (a.mailman == ctx.caller() && !s.settled) locked = true;
      if (!locked) {
        amount += it->second.deposit;
        it->second.deposit = 0;
        it->second.status = MailmanStatus::withdrawn;
      }
    }
    if (amount == 0) throw Revert("nothing to withdraw");
    credits_.erase(ctx.caller());
    ctx.transfer(ctx.caller(), amount);
    return;
  }

  throw Revert("strawman has no function '" + std::string(function) + "'");
}

void StrawmanContract::settle(StrawmanService& s) {
  s.settled = true;
  std::vector<Address> payees;
  if (s.receipt_revealed) {
    s.status = ServiceStatus::delivered_light;
    for (auto i : s.revealed)
      if (!s.slashed.count(s.assignments[i].mailman)) payees.push_back(s.assignments[i].mailman);
  } else {
    s.status = ServiceStatus::failed;
  }
  Amount paid = 0;
  if (!payees.empty()) {
    Amount each = s.remuneration / static_cast<Amount>(payees.size());
    for (const auto& p : payees) {
      credits_[p] += each;
      s.remunerated[p] += each;
    }
    paid = each * static_cast<Amount>(payees.size());
  }
  if (s.remuneration > paid) credits_[s.sender] += s.remuneration - paid;
}

void StrawmanContract::on_tick(CallContext& ctx) {
  for (auto& s : services_)
    if (!s.settled && ctx.tick() >= s.start_tick + 2 * config_.epoch_duration) settle(s);
}

nlohmann::json StrawmanContract::state() const {
  nlohmann::json mailmen = nlohmann::json::array();
  for (const auto& [a, m] : mailmen_)
    mailmen.push_back({{"address", a.hex()}, {"deposit", m.deposit}, {"status", to_string(m.status)}});
  nlohmann::json services = nlohmann::json::array();
  for (const auto& s : services_) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& a : s.assignments) list.push_back({{"mailman", a.mailman.hex()}, {"share_hash", a.share_hash.hex()}});
    services.push_back({{"sender", s.sender.hex()},
                        {"recipient", s.recipient.hex()},
                        {"timeframe", abi::encode(s.timeframe)},
                        {"t", s.t},
                        {"n", s.n},
                        {"receipt_hash", s.receipt_commitment.hex()},
                        {"remuneration", s.remuneration},
                        {"mailmen", list},
                        {"revealed", s.revealed},
                        {"receipt_revealed", s.receipt_revealed},
                        {"status", to_string(s.status)}});
  }
  nlohmann::json credits = nlohmann::json::object();
  for (const auto& [a, c] : credits_) credits[a.hex()] = c;
  return {{"mailmen", mailmen}, {"services", services}, {"credits", credits}};
}

}  // namespace sd
