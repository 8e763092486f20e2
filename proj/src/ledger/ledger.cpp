#include "silentdelivery/ledger/ledger.hpp"

#include "silentdelivery/crypto/hash.hpp"

namespace sd {

// ---- CallContext -----------------------------------------------------------

std::uint64_t CallContext::tick() const { return ledger_.tick(); }
const GasSchedule& CallContext::schedule() const { return ledger_.schedule(); }

void CallContext::emit(std::string name, nlohmann::json data) {
  if (parent_) {
    parent_->emit(std::move(name), std::move(data));
    return;
  }
  events_.push_back({std::move(name), std::move(data)});
}

CallContext CallContext::call_into(const Address& callee) {
  if (!is_contract(callee)) throw Revert("internal call into a non-contract address");
  CallContext sub(ledger_, self_, callee, 0, 0);
  sub.parent_ = this;
  return sub;
}

void CallContext::transfer(const Address& to, Amount amount) {
  if (amount < 0) throw Revert("negative transfer");
  if (amount == 0) return;
  auto& from = ledger_.mutable_account(self_);
  if (from.balance < amount) throw Revert("contract balance too low for transfer");
  auto& dest = ledger_.mutable_account(to);
  from.balance -= amount;
  dest.balance += amount;
}

void CallContext::burn(Amount amount) {
  if (amount < 0) throw Revert("negative burn");
  auto& from = ledger_.mutable_account(self_);
  if (from.balance < amount) throw Revert("contract balance too low to burn");
  from.balance -= amount;
  ledger_.burned_ += amount;
}

Address CallContext::create(std::unique_ptr<Contract> code) {
  auto addr = ledger_.create_contract(self_, std::move(code));
  created_ = addr;
  return addr;
}

Address CallContext::predict_created() const {
  return Ledger::predict_address(self_, ledger_.account(self_).nonce);
}

Contract& CallContext::contract(const Address& a) {
  auto it = ledger_.contracts_.find(a);
  if (it == ledger_.contracts_.end()) throw Revert("no contract at " + a.hex());
  return *it->second;
}

bool CallContext::is_contract(const Address& a) const { return ledger_.contracts_.count(a) != 0; }

// ---- Ledger ----------------------------------------------------------------

Ledger::Ledger(GasSchedule schedule, LedgerConfig config) : schedule_(std::move(schedule)), config_(config) {
  schedule_.validate();
  if (config_.slots_per_day == 0) throw std::invalid_argument("slots_per_day must be positive");
}

KeyPair Ledger::create_eoa(Rng& rng) {
  for (;;) {
    auto kp = keypair_gen(rng);
    if (accounts_.count(kp.address)) continue;
    accounts_[kp.address] = Account{kp.address, AccountKind::eoa, 0, 0};
    return kp;
  }
}

void Ledger::fund(const Address& a, Amount amount) {
  if (amount < 0) throw std::invalid_argument("cannot fund a negative amount");
  mutable_account(a).balance += amount;
  minted_ += amount;
}

void Ledger::escrow_transfer(const Address& from, const Address& to, Amount amount, std::string memo) {
  auto& src = mutable_account(from);
  auto& dst = mutable_account(to);
  if (amount < 0) throw std::invalid_argument("negative escrow transfer");
  if (src.balance < amount) throw InsufficientBalanceError("escrow payer cannot cover " + format_ether(amount));
  src.balance -= amount;
  dst.balance += amount;
  transfers_.push_back({tick_, from, to, amount, std::move(memo)});
}

Address Ledger::predict_address(const Address& creator, std::uint64_t nonce) {
  Bytes n;
  append_u64(n, nonce);
  auto d = hash_fields({as_bytes("create"), creator.view(), n});
  Address a;
  std::copy(d.bytes.end() - 20, d.bytes.end(), a.bytes.begin());
  return a;
}

Address Ledger::create_contract(const Address& creator, std::unique_ptr<Contract> code) {
  auto& c = mutable_account(creator);
  Address addr = predict_address(creator, c.nonce);
  ++c.nonce;
  if (accounts_.count(addr)) throw LedgerError("contract address collision");
  accounts_[addr] = Account{addr, AccountKind::contract, 0, 0};
  contracts_[addr] = std::move(code);
  return addr;
}

Address Ledger::install_genesis(std::unique_ptr<Contract> code) {
  Address genesis{};
  Bytes n;
  append_u64(n, contracts_.size());
  auto d = hash_fields({as_bytes("genesis"), n});
  std::copy(d.bytes.end() - 20, d.bytes.end(), genesis.bytes.begin());
  accounts_[genesis] = Account{genesis, AccountKind::contract, 0, 0};
  contracts_[genesis] = std::move(code);
  return genesis;
}

Account& Ledger::mutable_account(const Address& a) {
  auto it = accounts_.find(a);
  if (it == accounts_.end()) throw UnknownAccountError("unknown account " + a.hex());
  return it->second;
}

const Account& Ledger::account(const Address& a) const {
  auto it = accounts_.find(a);
  if (it == accounts_.end()) throw UnknownAccountError("unknown account " + a.hex());
  return it->second;
}

const Contract* Ledger::contract(const Address& a) const {
  auto it = contracts_.find(a);
  return it == contracts_.end() ? nullptr : it->second.get();
}

void Ledger::charge(const Address& caller, Amount fee) {
  auto& acc = mutable_account(caller);
  acc.balance -= fee;
  ++acc.nonce;
  gas_sink_ += fee;
}

Ledger::World Ledger::snapshot() const {
  World w;
  w.accounts = accounts_;
  for (const auto& [a, c] : contracts_) w.contracts.emplace(a, c->clone());
  w.burned = burned_;
  return w;
}

void Ledger::restore(World w) {
  accounts_ = std::move(w.accounts);
  contracts_ = std::move(w.contracts);
  burned_ = w.burned;
}

TxReceipt Ledger::deploy_contract(const Address& creator, std::unique_ptr<Contract> code,
                                  std::string_view gas_function, nlohmann::json args, Amount value) {
  const auto& acc = account(creator);
  if (acc.kind != AccountKind::eoa) throw LedgerError("only externally owned accounts deploy directly");
  const auto gas = schedule_.gas_for(gas_function);
  const auto fee = schedule_.fee(gas);
  if (acc.balance < fee + value) throw InsufficientBalanceError("creator cannot pay for deployment");

  TxReceipt r;
  r.seq = seq_++;
  r.tick = tick_;
  r.phase = phase_;
  r.caller = creator;
  r.function = std::string(gas_function);
  r.args = std::move(args);
  r.value = value;
  r.gas_used = gas;
  r.fee = fee;
  r.usd = schedule_.usd(gas);

  // Creation consumes the creator's current nonce.
  Address addr = predict_address(creator, acc.nonce);
  gas_sink_ += fee;
  mutable_account(creator).balance -= fee;
  create_contract(creator, std::move(code));
  if (value > 0) {
    mutable_account(creator).balance -= value;
    mutable_account(addr).balance += value;
  }
  r.target = addr;
  r.created = addr;
  r.success = true;
  receipts_.push_back(r);
  return r;
}

TxReceipt Ledger::submit_tx(const Address& caller, const Address& target, std::string_view function,
                            nlohmann::json args, Amount value) {
  const auto& acc = account(caller);
  if (acc.kind != AccountKind::eoa) throw LedgerError("transactions originate from externally owned accounts");
  auto cit = contracts_.find(target);
  if (cit == contracts_.end()) throw UnknownAccountError("no contract at target " + target.hex());
  if (value < 0) throw std::invalid_argument("negative call value");

  const std::string key = cit->second->gas_key(function);
  const auto gas = schedule_.gas_for(key, cit->second->gas_items(function, args));
  const auto fee = schedule_.fee(gas);
  if (acc.balance < fee + value) throw InsufficientBalanceError("caller cannot pay gas and value");

  TxReceipt r;
  r.seq = seq_++;
  r.tick = tick_;
  r.phase = phase_;
  r.caller = caller;
  r.target = target;
  r.function = std::string(function);
  r.args = args;
  r.value = value;
  r.gas_used = gas;
  r.fee = fee;
  r.usd = schedule_.usd(gas);

  charge(caller, fee);
  World before = snapshot();
  CallContext ctx(*this, caller, target, value, fee);
  try {
    auto& from = mutable_account(caller);
    from.balance -= value;
    mutable_account(target).balance += value;
    contracts_.at(target)->invoke(ctx, function, args);
    r.success = true;
    r.events = std::move(ctx.events());
    r.created = ctx.created();
  } catch (const std::exception& e) {
    restore(std::move(before));
    r.success = false;
    r.error = e.what();
  }
  receipts_.push_back(r);
  return r;
}

std::uint64_t Ledger::tick_of(TimeFrame f) const {
  if (f.slot >= config_.slots_per_day) throw std::invalid_argument("slot outside the day");
  return static_cast<std::uint64_t>(f.day) * config_.slots_per_day + f.slot;
}

TimeFrame Ledger::frame_of(std::uint64_t tick) const {
  return {static_cast<std::uint32_t>(tick / config_.slots_per_day),
          static_cast<std::uint32_t>(tick % config_.slots_per_day)};
}

void Ledger::advance_to_tick(std::uint64_t tick) {
  if (tick < tick_) throw TimeRegressionError("clock cannot move backwards");
  while (tick_ < tick) {
    ++tick_;
    std::vector<Address> order;
    order.reserve(contracts_.size());
    for (const auto& [a, _] : contracts_) order.push_back(a);
    for (const auto& a : order) {
      CallContext ctx(*this, Address{}, a, 0, 0);
      contracts_.at(a)->on_tick(ctx);
    }
  }
}

Amount Ledger::total_balances() const {
  Amount sum = 0;
  for (const auto& [_, a] : accounts_) sum += a.balance;
  return sum;
}

nlohmann::json receipt_to_json(const TxReceipt& r) {
  nlohmann::json j{{"seq", r.seq},
                   {"tick", r.tick},
                   {"phase", r.phase},
                   {"caller", r.caller.hex()},
                   {"target", r.target.hex()},
                   {"function", r.function},
                   {"args", r.args},
                   {"value", r.value},
                   {"gas_used", r.gas_used},
                   {"fee", r.fee},
                   {"usd", format_rational(r.usd)},
                   {"success", r.success}};
  if (!r.error.empty()) j["error"] = r.error;
  if (r.created) j["created"] = r.created->hex();
  auto& ev = j["events"] = nlohmann::json::array();
  for (const auto& e : r.events) ev.push_back({{"name", e.name}, {"data", e.data}});
  return j;
}

nlohmann::json Ledger::onchain_state(bool omit_payers) const {
  nlohmann::json j;
  auto& cs = j["contracts"] = nlohmann::json::object();
  for (const auto& [a, c] : contracts_)
    cs[a.hex()] = {{"kind", c->kind()}, {"balance", account(a).balance}, {"storage", c->state()}};
  auto& calls = j["calls"] = nlohmann::json::array();
  for (const auto& r : receipts_) {
    nlohmann::json call{{"target", r.target.hex()}, {"function", r.function}, {"args", r.args},
                        {"value", r.value},         {"success", r.success},   {"gas_used", r.gas_used}};
    if (!omit_payers) call["caller"] = r.caller.hex();
    calls.push_back(std::move(call));
  }
  if (!omit_payers) {
    auto& bal = j["balances"] = nlohmann::json::object();
    for (const auto& [a, acc] : accounts_)
      if (acc.kind == AccountKind::eoa) bal[a.hex()] = acc.balance;
  }
  return j;
}

Digest256 Ledger::state_hash(bool omit_payers) const { return hash256(as_bytes(onchain_state(omit_payers).dump())); }

}  // namespace sd
