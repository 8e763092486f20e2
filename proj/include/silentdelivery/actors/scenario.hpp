#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "silentdelivery/channels/message_bus.hpp"
#include "silentdelivery/contracts/agent.hpp"
#include "silentdelivery/ledger/ledger.hpp"

namespace sd {

struct ScenarioError : std::invalid_argument {
  explicit ScenarioError(const std::string& msg) : std::invalid_argument(msg) {}
  ScenarioError(std::string field_name, const std::string& msg)
      : std::invalid_argument(msg), field(std::move(field_name)) {}
  /// Configuration key at fault, when there is one.
  std::string field;
};

/// How a mailman behaves during one run.
enum class FaultPolicy {
  honest,
  /// Publishes its time-frame privkey before the time frame.
  premature,
  /// Never reveals its privkey.
  absent,
  /// Reveals a privkey that does not match its registered pubkey.
  fake,
  /// Skips the private reveal of the lightweight path, honest otherwise.
  withhold_light,
  /// Files a premature report with a key it made up.
  false_reporter,
  /// Honest unless an adversary pays more than its deposit for its key.
  briberable,
  /// Declines the recruitment handshake.
  refuse,
};

std::string to_string(FaultPolicy p);
/// Throws ScenarioError on an unknown name.
FaultPolicy parse_fault_policy(std::string_view name);

enum class ProtocolVariant { silent, strawman };
std::string to_string(ProtocolVariant v);

struct ScenarioConfig {
  std::uint64_t seed = 1;
  ProtocolVariant variant = ProtocolVariant::silent;
  std::uint32_t pool_size = 30;
  std::uint32_t l = 3;
  std::uint32_t t = 4;
  std::uint32_t n = 10;
  Amount deposit = kUnitsPerEther;
  Amount remuneration = kUnitsPerEther;
  /// Minimum deposit enforced by the agent; defaults to `deposit`.
  std::optional<Amount> min_deposit;
  /// Per-obligation probability that a mailman shows up (A_T).
  double availability = 1.0;
  double drop_probability = 0.0;
  bool private_metadata_visible = true;
  std::uint32_t slots_per_day = 24;
  std::uint64_t epoch_duration = 1;
  /// Ticks between registration (tick 0) and the service time frame.
  std::uint64_t lead_ticks = 3;
  Amount mailman_funds = 10 * kUnitsPerEther;
  Amount sender_funds = 10 * kUnitsPerEther;
  Amount recipient_funds = kUnitsPerEther;
  /// Policies keyed by pool index (0-based).
  std::map<std::uint32_t, FaultPolicy> pool_faults;
  /// Policies keyed by recruitment position (1-based). Wins over pool_faults.
  std::map<std::uint32_t, FaultPolicy> recruit_faults;
  /// Pool indices to invite, in position order, instead of a random draw.
  std::optional<std::vector<std::uint32_t>> selection;
  /// Corrupts the sender's first delivery to the recipient so the resend
  /// path runs.
  bool tamper_first_delivery = false;
  std::string info = "meet at the old harbour at dawn";
  GasSchedule schedule = GasSchedule::defaults();

  std::uint32_t recruited() const { return variant == ProtocolVariant::silent ? l * n : n; }
  std::uint64_t timeframe_tick() const { return lead_ticks; }
  Amount effective_min_deposit() const { return min_deposit.value_or(deposit); }
  /// Throws ScenarioError naming the first violated precondition.
  void validate() const;
  nlohmann::json to_json() const;
};

struct Misbehavior {
  std::uint64_t tick = 0;
  Address mailman;
  std::string kind;
};

struct SlashRecord {
  Address mailman;
  std::string reason;
  Amount amount = 0;
  Amount reward = 0;
};

/// Everything one protocol run produced.
struct ScenarioTrace {
  std::uint64_t seed = 0;
  ProtocolVariant variant = ProtocolVariant::silent;
  ServiceStatus outcome = ServiceStatus::pending;
  ServiceMode mode = ServiceMode::lightweight;
  std::vector<std::uint32_t> epoch_path;

  Address agent;
  Address sender;
  Address recipient;
  Address switch_addr;
  std::vector<Address> pool;
  /// Recruited mailmen in position order.
  std::vector<Address> recruited;
  std::map<Address, FaultPolicy> policies;

  std::vector<TxReceipt> receipts;
  std::vector<TransferRecord> transfers;
  std::vector<ChannelMsg> messages;
  std::vector<ObservedMsg> observed;
  std::vector<Misbehavior> misbehavior;
  std::vector<SlashRecord> slashes;
  std::map<Address, Amount> remunerated;

  std::map<Address, Amount> initial_balances;
  std::map<Address, Amount> final_balances;

  bool recipient_restored = false;
  bool info_matches = false;
  std::uint32_t resend_requests = 0;
  std::uint32_t refusals = 0;

  /// On-chain state without payer fields, taken when delivery ends and
  /// before settlement calls.
  nlohmann::json delivery_state;
  Digest256 delivery_state_hash;
  /// On-chain state without payer fields after settlement.
  nlohmann::json final_state;
  Digest256 final_state_hash;

  Amount minted = 0;
  Amount gas_sink = 0;
  Amount burned = 0;
  bool conserved = false;

  /// Gas of the calls that make up the service itself: setup through the
  /// last delivery epoch, leaving out registration and settlement.
  std::uint64_t service_gas() const;
  Rational service_usd() const;
  std::uint64_t total_gas() const;
  bool misbehaved(const Address& mailman) const;
  Amount payoff(const Address& a) const;
};

/// Phase labels that belong to the service cost.
bool is_service_phase(std::string_view phase);

nlohmann::json summary_json(const ScenarioTrace& trace);
/// Line-delimited records: one per receipt, transfer and message, then a
/// summary record.
std::string trace_jsonl(const ScenarioTrace& trace);

}  // namespace sd
