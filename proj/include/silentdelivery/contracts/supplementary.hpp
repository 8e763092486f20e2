#pragma once

#include <map>
#include <optional>
#include <vector>

#include "silentdelivery/contracts/agent.hpp"

namespace sd {

struct PrematureReport {
  std::uint32_t index = 0;
  Address reporter;
  BoxSecretKey privkey;
};

struct RevealedIdentity {
  Agreement agreement;
  Address mailman;
};

struct RevealedPrivkey {
  BoxSecretKey privkey;
  bool matches = false;
};

struct AccusationReport {
  std::uint32_t index = 0;
  Address reporter;
};

/// C_sup: heavyweight-mode enforcement for one service. Holds reports,
/// revealed identities and privkeys, and forwards verified slashes to the
/// agent contract in epoch 4.
class SupplementaryContract : public Contract {
 public:
  SupplementaryContract(Address agent, Address switch_addr, Address deployed_by, Amount deploy_fee)
      : agent_(agent), switch_(switch_addr), deployed_by_(deployed_by) {
    gas_log_.push_back({deployed_by, deploy_fee, "deploySupplementary"});
  }

  std::string kind() const override { return "supplementary"; }
  std::unique_ptr<Contract> clone() const override { return std::make_unique<SupplementaryContract>(*this); }
  void invoke(CallContext& ctx, std::string_view function, const nlohmann::json& args) override;
  std::uint64_t gas_items(std::string_view function, const nlohmann::json& args) const override;
  nlohmann::json state() const override;

  const Address& switch_addr() const { return switch_; }
  const Address& deployed_by() const { return deployed_by_; }
  const std::vector<PrematureReport>& premature_reports() const { return premature_; }
  const std::map<std::uint32_t, RevealedIdentity>& identities() const { return identities_; }
  const std::map<std::uint32_t, RevealedPrivkey>& privkeys() const { return privkeys_; }
  const std::vector<AccusationReport>& absent_reports() const { return absent_; }
  const std::vector<AccusationReport>& fake_reports() const { return fake_; }
  bool informed() const { return informed_; }
  /// Index under which `mailman` was revealed, if any.
  std::optional<std::uint32_t> index_of(const Address& mailman) const;

 private:
  const ServiceRecord& service(CallContext& ctx) const;
  void require_epoch(CallContext& ctx, std::uint32_t epoch) const;
  void require_mailman(CallContext& ctx) const;
  bool accused(std::uint32_t index) const;

  void report_premature(CallContext& ctx, const nlohmann::json& args);
  void reveal_identity(CallContext& ctx, const nlohmann::json& args);
  void reveal_privkey(CallContext& ctx, const nlohmann::json& args);
  void report_absent(CallContext& ctx, const nlohmann::json& args);
  void report_fake(CallContext& ctx, const nlohmann::json& args);
  void inform_agent(CallContext& ctx);

  Address agent_;
  Address switch_;
  Address deployed_by_;
  std::vector<PrematureReport> premature_;
  std::map<std::uint32_t, RevealedIdentity> identities_;
  std::map<std::uint32_t, RevealedPrivkey> privkeys_;
  std::vector<AccusationReport> absent_;
  std::vector<AccusationReport> fake_;
  std::vector<GasClaim> gas_log_;
  bool informed_ = false;
};

}  // namespace sd
