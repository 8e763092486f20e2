#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "silentdelivery/contracts/abi.hpp"

namespace sd {

enum class MailmanStatus { active, withdrawn, slashed };
enum class ServiceStatus { pending, delivered_light, delivered_heavy, failed };
enum class ServiceMode { lightweight, heavyweight };

std::string to_string(MailmanStatus s);
std::string to_string(ServiceStatus s);
std::string to_string(ServiceMode m);

struct MailmanRecord {
  Address address;
  BoxPublicKey whisper_pub;
  std::map<TimeFrame, BoxPublicKey> timeframe_pubkeys;
  Amount deposit = 0;
  MailmanStatus status = MailmanStatus::active;
};

struct ServiceSpec {
  TimeFrame timeframe;
  std::uint32_t l = 1;
  std::uint32_t t = 1;
  std::uint32_t n = 1;
  Address switch_addr;
  Address sup_addr;
  Address recipient;
  Digest256 receipt_commitment;
  Amount remuneration = 0;
  ServiceStatus status = ServiceStatus::pending;

  /// Mailmen recruited for the service: one group of l per share.
  std::uint32_t recruited() const { return l * n; }
};

struct ServiceRecord {
  ServiceSpec spec;
  Address sender;
  std::uint64_t start_tick = 0;
  std::uint32_t epoch = 0;
  std::uint64_t epoch_end = 0;
  std::vector<std::uint32_t> epoch_path{0};
  ServiceMode mode = ServiceMode::lightweight;
  bool settled = false;
  bool reports_applied = false;
  /// Lightweight success: amount paid per proven agreement.
  Amount per_claim = 0;
  std::set<std::uint32_t> proven_indices;
  std::set<Address> provers;
  std::set<Address> slashed;
  /// Remuneration credited to each mailman.
  std::map<Address, Amount> remunerated;
};

/// A verified misbehavior forwarded by the supplementary contract.
struct Slash {
  Address accused;
  std::optional<Address> reporter;
  std::string reason;
  std::uint32_t index = 0;
};

/// Heavyweight-mode gas spent by one party, eligible for compensation.
struct GasClaim {
  Address payer;
  Amount fee = 0;
  std::string function;
};

struct AgentConfig {
  Amount min_deposit = 0;
  /// Clock ticks per epoch.
  std::uint64_t epoch_duration = 1;
};

/// C_agent: mailman registry, service escrow, epoch clock and settlement.
class AgentContract : public Contract {
 public:
  explicit AgentContract(AgentConfig config) : config_(config) {}

  std::string kind() const override { return "agent"; }
  std::unique_ptr<Contract> clone() const override { return std::make_unique<AgentContract>(*this); }
  void invoke(CallContext& ctx, std::string_view function, const nlohmann::json& args) override;
  void on_tick(CallContext& ctx) override;
  nlohmann::json state() const override;

  const AgentConfig& config() const { return config_; }
  const MailmanRecord* mailman(const Address& a) const;
  bool is_mailman(const Address& a) const { return mailman(a) != nullptr; }
  const ServiceRecord* service(const Address& switch_addr) const;
  const std::map<Address, ServiceRecord>& services() const { return services_; }
  const std::map<Address, MailmanRecord>& mailmen() const { return mailmen_; }
  Amount credit(const Address& a) const;
  /// First tick at which `a` may take its deposit back.
  std::uint64_t unlock_tick(const Ledger& ledger, const Address& a) const;

  // Calls from the switch and supplementary contracts of a service.
  void mark_heavyweight(CallContext& ctx, const Address& switch_addr);
  void apply_reports(CallContext& ctx, const Address& switch_addr, const std::vector<Slash>& slashes,
                     const std::vector<GasClaim>& claims);

 private:
  void new_mailman(CallContext& ctx, const nlohmann::json& args);
  void new_service(CallContext& ctx, const nlohmann::json& args);
  void recipient_receipt(CallContext& ctx, const nlohmann::json& args);
  void prove_agreement(CallContext& ctx, const nlohmann::json& args);
  void withdraw(CallContext& ctx);

  ServiceRecord& service_mut(const Address& switch_addr);
  void enter_epoch(CallContext& ctx, ServiceRecord& s, std::uint32_t epoch);
  void settle(CallContext& ctx, ServiceRecord& s);

  AgentConfig config_;
  std::map<Address, MailmanRecord> mailmen_;
  std::map<Address, ServiceRecord> services_;
  std::map<Address, Amount> credits_;
};

}  // namespace sd
