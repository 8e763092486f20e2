#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "silentdelivery/crypto/signature.hpp"
#include "silentdelivery/ledger/amount.hpp"
#include "silentdelivery/ledger/gas_schedule.hpp"

namespace sd {

struct LedgerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownAccountError : LedgerError {
  using LedgerError::LedgerError;
};
struct InsufficientBalanceError : LedgerError {
  using LedgerError::LedgerError;
};
struct TimeRegressionError : LedgerError {
  using LedgerError::LedgerError;
};

/// Thrown inside a contract call to abort it. The ledger rolls state back
/// and reports success = false; gas is still charged.
struct Revert : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AccountKind { eoa, contract };

struct Account {
  Address address;
  AccountKind kind = AccountKind::eoa;
  Amount balance = 0;
  std::uint64_t nonce = 0;
};

/// A [day, slot] time frame. Ticks count slots from day 0, slot 0.
struct TimeFrame {
  std::uint32_t day = 0;
  std::uint32_t slot = 0;
  auto operator<=>(const TimeFrame&) const = default;
};

struct Event {
  std::string name;
  nlohmann::json data;
};

struct TxReceipt {
  std::uint64_t seq = 0;
  std::uint64_t tick = 0;
  std::string phase;
  Address caller;
  Address target;
  std::string function;
  nlohmann::json args;
  Amount value = 0;
  std::uint64_t gas_used = 0;
  Amount fee = 0;
  /// gas_used × gas_to_ether × ether_to_usd, exact.
  Rational usd;
  bool success = false;
  std::string error;
  std::vector<Event> events;
  std::optional<Address> created;
};

/// Unmetered value movement outside a transaction (the bribery escrow).
struct TransferRecord {
  std::uint64_t tick = 0;
  Address from;
  Address to;
  Amount amount = 0;
  std::string memo;
};

class Ledger;
class CallContext;

/// On-chain state machine. Implementations hold plain value state so the
/// ledger can snapshot them with clone() and roll back reverted calls.
class Contract {
 public:
  virtual ~Contract() = default;
  virtual std::string kind() const = 0;
  virtual std::unique_ptr<Contract> clone() const = 0;
  /// Throws Revert on contract-level failure.
  virtual void invoke(CallContext& ctx, std::string_view function, const nlohmann::json& args) = 0;
  /// Gas-schedule key for `function`.
  virtual std::string gas_key(std::string_view function) const { return std::string(function); }
  /// Item count for per-item gas (e.g. agreements in one reveal).
  virtual std::uint64_t gas_items(std::string_view, const nlohmann::json&) const { return 0; }
  /// Clock hook, fired once per tick in address order.
  virtual void on_tick(CallContext&) {}
  /// Canonical storage contents.
  virtual nlohmann::json state() const = 0;
};

/// What a running contract may do to the world.
class CallContext {
 public:
  CallContext(Ledger& ledger, Address caller, Address self, Amount value, Amount fee)
      : ledger_(ledger), caller_(caller), self_(self), value_(value), fee_(fee) {}

  const Address& caller() const { return caller_; }
  const Address& self() const { return self_; }
  Amount value() const { return value_; }
  /// Fee the caller paid for this transaction (0 in clock hooks).
  Amount fee() const { return fee_; }
  std::uint64_t tick() const;
  const GasSchedule& schedule() const;

  void emit(std::string name, nlohmann::json data = nlohmann::json::object());
  /// Moves `amount` from this contract's balance.
  void transfer(const Address& to, Amount amount);
  void burn(Amount amount);
  /// Deploys `code` with this contract as creator; returns its address.
  Address create(std::unique_ptr<Contract> code);
  Address predict_created() const;

  /// Context for a direct internal call from this contract into `callee`.
  /// Events emitted through it land in this context's event list.
  CallContext call_into(const Address& callee);

  Contract& contract(const Address& a);
  template <typename T>
  T& contract_as(const Address& a) {
    auto* c = dynamic_cast<T*>(&contract(a));
    if (!c) throw Revert("address does not hold the expected contract kind");
    return *c;
  }
  bool is_contract(const Address& a) const;
  const Ledger& ledger() const { return ledger_; }

  std::vector<Event>& events() { return events_; }
  std::optional<Address> created() const { return created_; }

 private:
  Ledger& ledger_;
  Address caller_;
  Address self_;
  Amount value_;
  Amount fee_;
  std::vector<Event> events_;
  std::optional<Address> created_;
  CallContext* parent_ = nullptr;
};

struct LedgerConfig {
  std::uint32_t slots_per_day = 24;
};

/// Deterministic single-chain ledger. Single writer: every transaction is
/// applied in the order submitted.
class Ledger {
 public:
  explicit Ledger(GasSchedule schedule, LedgerConfig config = {});
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  const GasSchedule& schedule() const { return schedule_; }

  KeyPair create_eoa(Rng& rng);
  void fund(const Address& a, Amount amount);
  /// Unmetered EOA-to-account transfer, recorded in transfers().
  void escrow_transfer(const Address& from, const Address& to, Amount amount, std::string memo);

  /// Address a contract created by `creator` at `nonce` will receive.
  static Address predict_address(const Address& creator, std::uint64_t nonce);

  /// Creates a contract with no creator and no gas, e.g. the agent
  /// contract that exists before any scenario starts.
  Address install_genesis(std::unique_ptr<Contract> code);

  /// Deploys `code` from EOA `creator`, charging the schedule entry
  /// `gas_function`. Throws on unknown or underfunded creator.
  TxReceipt deploy_contract(const Address& creator, std::unique_ptr<Contract> code, std::string_view gas_function,
                            nlohmann::json args = nlohmann::json::object(), Amount value = 0);

  /// Runs `function` on contract `target` atomically. Gas is always
  /// charged; on Revert the world is restored and success = false.
  /// Throws before any state change if the caller cannot pay.
  TxReceipt submit_tx(const Address& caller, const Address& target, std::string_view function,
                      nlohmann::json args = nlohmann::json::object(), Amount value = 0);

  void advance_to_tick(std::uint64_t tick);
  void advance_time(TimeFrame to) { advance_to_tick(tick_of(to)); }
  std::uint64_t tick() const { return tick_; }
  TimeFrame current_time() const { return frame_of(tick_); }
  std::uint64_t tick_of(TimeFrame f) const;
  TimeFrame frame_of(std::uint64_t tick) const;

  /// Label attached to subsequent receipts ("send", "epoch-1", ...).
  void set_phase(std::string phase) { phase_ = std::move(phase); }
  const std::string& phase() const { return phase_; }

  bool exists(const Address& a) const { return accounts_.count(a) != 0; }
  const Account& account(const Address& a) const;
  Amount balance(const Address& a) const { return account(a).balance; }
  const Contract* contract(const Address& a) const;
  template <typename T>
  const T* contract_as(const Address& a) const {
    return dynamic_cast<const T*>(contract(a));
  }

  const std::vector<TxReceipt>& receipts() const { return receipts_; }
  const std::vector<TransferRecord>& transfers() const { return transfers_; }

  Amount minted() const { return minted_; }
  Amount gas_sink() const { return gas_sink_; }
  Amount burned() const { return burned_; }
  Amount total_balances() const;
  /// minted == balances + gas sink + burned.
  bool conserved() const { return minted_ == total_balances() + gas_sink_ + burned_; }

  /// Canonical on-chain bytes: every contract's storage plus every
  /// receipt's call data. With `omit_payers`, caller fields and account
  /// balances are left out.
  nlohmann::json onchain_state(bool omit_payers) const;
  Digest256 state_hash(bool omit_payers = false) const;

 private:
  friend class CallContext;

  struct World {
    std::map<Address, Account> accounts;
    std::map<Address, std::unique_ptr<Contract>> contracts;
    Amount burned = 0;
  };
  World snapshot() const;
  void restore(World w);

  Account& mutable_account(const Address& a);
  Address create_contract(const Address& creator, std::unique_ptr<Contract> code);
  void charge(const Address& caller, Amount fee);

  GasSchedule schedule_;
  LedgerConfig config_;
  std::map<Address, Account> accounts_;
  std::map<Address, std::unique_ptr<Contract>> contracts_;
  std::vector<TxReceipt> receipts_;
  std::vector<TransferRecord> transfers_;
  std::uint64_t tick_ = 0;
  std::uint64_t seq_ = 0;
  std::string phase_;
  Amount minted_ = 0;
  Amount gas_sink_ = 0;
  Amount burned_ = 0;
};

nlohmann::json receipt_to_json(const TxReceipt& r);

}  // namespace sd
