#pragma once

#include <optional>

#include "silentdelivery/contracts/abi.hpp"

namespace sd {

/// C_sw: per-service switch. Deploying the supplementary contract through
/// it flips the service into heavyweight mode. The supplementary contract
/// is the switch's first creation, so its address is known at setup.
class SwitchContract : public Contract {
 public:
  SwitchContract(Address agent, Address sender) : agent_(agent), sender_(sender) {}

  std::string kind() const override { return "switch"; }
  std::unique_ptr<Contract> clone() const override { return std::make_unique<SwitchContract>(*this); }
  void invoke(CallContext& ctx, std::string_view function, const nlohmann::json& args) override;
  nlohmann::json state() const override;

  const Address& agent() const { return agent_; }
  const Address& sender() const { return sender_; }
  bool deployed() const { return sup_.has_value(); }
  const std::optional<Address>& supplementary() const { return sup_; }
  const std::optional<Address>& deployed_by() const { return deployed_by_; }

  /// Address the supplementary contract will receive.
  static Address predict_supplementary(const Address& switch_addr) { return Ledger::predict_address(switch_addr, 0); }

 private:
  Address agent_;
  Address sender_;
  std::optional<Address> sup_;
  std::optional<Address> deployed_by_;
};

}  // namespace sd
