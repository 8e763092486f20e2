#pragma once

#include <map>
#include <set>
#include <vector>

#include "silentdelivery/contracts/agent.hpp"

namespace sd {

/// Share commitment published by the baseline protocol at setup.
struct StrawmanAssignment {
  Address mailman;
  Digest256 share_hash;
};

struct StrawmanService {
  Address sender;
  Address recipient;
  TimeFrame timeframe;
  std::uint64_t start_tick = 0;
  std::uint32_t t = 1;
  std::uint32_t n = 1;
  Digest256 receipt_commitment;
  Amount remuneration = 0;
  std::vector<StrawmanAssignment> assignments;
  std::set<std::uint32_t> revealed;
  std::set<Address> slashed;
  /// Remuneration credited to each mailman at settlement.
  std::map<Address, Amount> remunerated;
  bool receipt_revealed = false;
  bool settled = false;
  ServiceStatus status = ServiceStatus::pending;
};

/// Baseline protocol with public recruitment: the sender lists every
/// mailman and share hash on chain and each mailman reveals its share on
/// chain. Used only for comparison runs.
class StrawmanContract : public Contract {
 public:
  explicit StrawmanContract(AgentConfig config) : config_(config) {}

  std::string kind() const override { return "strawman"; }
  std::unique_ptr<Contract> clone() const override { return std::make_unique<StrawmanContract>(*this); }
  void invoke(CallContext& ctx, std::string_view function, const nlohmann::json& args) override;
  std::string gas_key(std::string_view function) const override { return "strawman." + std::string(function); }
  std::uint64_t gas_items(std::string_view function, const nlohmann::json& args) const override;
  void on_tick(CallContext& ctx) override;
  nlohmann::json state() const override;

  const std::vector<StrawmanService>& services() const { return services_; }
  const MailmanRecord* mailman(const Address& a) const;
  Amount credit(const Address& a) const;

 private:
  StrawmanService& service_arg(const nlohmann::json& args);
  void settle(StrawmanService& s);

  AgentConfig config_;
  std::map<Address, MailmanRecord> mailmen_;
  std::vector<StrawmanService> services_;
  std::map<Address, Amount> credits_;
};

}  // namespace sd
