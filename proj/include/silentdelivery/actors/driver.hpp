#pragma once

#include <memory>
#include <set>

#include "silentdelivery/actors/participants.hpp"
#include "silentdelivery/channels/message_bus.hpp"

namespace sd {

/// One protocol run under a single driver: registration, silent
/// recruitment, then the epoch machine through settlement.
///
/// Timeline in clock ticks: 0 registration, 1 setup and recruitment,
/// 2..T-1 epoch 0, T the service time frame, one epoch per
/// `epoch_duration` ticks after that.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);

  /// Registration, service setup and recruitment.
  void setup();
  /// Epoch 0 onward, through settlement. Calls setup() first if needed.
  ScenarioTrace run_delivery();
  ScenarioTrace run() { return run_delivery(); }

  const ScenarioConfig& config() const { return config_; }
  Ledger& ledger() { return *ledger_; }
  const Ledger& ledger() const { return *ledger_; }
  MessageBus& bus() { return *bus_; }
  const Address& agent() const { return agent_; }
  const SenderActor& sender() const { return sender_; }
  const RecipientActor& recipient() const { return recipient_; }
  std::vector<MailmanActor>& pool() { return pool_; }
  const std::vector<MailmanActor>& pool() const { return pool_; }
  /// Recruited mailman at 1-based `position`.
  MailmanActor& recruit(std::uint32_t position) { return pool_.at(sender_.selected.at(position - 1)); }
  const AgentContract& agent_contract() const;
  const ServiceRecord& service() const;
  /// Records an off-protocol event (bribes, injected faults) in the trace.
  void log_misbehavior(const Address& mailman, std::string kind);

 private:
  void register_pool();
  void setup_service();
  void recruit_mailmen();
  void distribute_shares();
  void epoch0();
  void epoch1();
  void epoch2();
  void epoch3();
  void epoch4();
  void epoch5();
  void settle();

  TxReceipt call(const Address& caller, const Address& target, std::string_view function, nlohmann::json args,
                 Amount value = 0);
  bool present(MailmanActor& m);
  MailmanActor* first_dutiful(std::optional<Address> excluding = std::nullopt);
  void recipient_collect(std::string_view from_topic);
  void recipient_try_restore();
  bool recipient_submit();
  std::vector<std::uint32_t> draw_selection(std::uint32_t count, const std::set<std::uint32_t>& exclude);
  void finish(ScenarioTrace& trace);

  ScenarioConfig config_;
  Rng root_;
  std::unique_ptr<Ledger> ledger_;
  std::unique_ptr<MessageBus> bus_;
  Address agent_;
  SenderActor sender_;
  RecipientActor recipient_;
  std::vector<MailmanActor> pool_;
  PeelCache recipient_cache_;
  PeelCache public_cache_;
  Rng selection_rng_{0};
  bool set_up_ = false;
  std::vector<Misbehavior> misbehavior_;
  std::map<Address, Amount> initial_;
  std::uint32_t resend_requests_ = 0;
  std::uint32_t refusals_ = 0;
  nlohmann::json delivery_state_;
};

/// Runs `config` under its protocol variant.
ScenarioTrace run_scenario(const ScenarioConfig& config);

/// Runs the public-recruitment baseline.
ScenarioTrace run_strawman(const ScenarioConfig& config);

}  // namespace sd
