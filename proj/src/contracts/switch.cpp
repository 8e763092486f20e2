#include "silentdelivery/contracts/switch.hpp"

#include "silentdelivery/contracts/agent.hpp"
#include "silentdelivery/contracts/supplementary.hpp"
#include "silentdelivery/crypto/errors.hpp"

namespace sd {

void SwitchContract::invoke(CallContext& ctx, std::string_view function, const nlohmann::json& args) {
  if (function != fn::kDeploySupplementary) throw Revert("switch has no function '" + std::string(function) + "'");
  if (abi::address_arg(args, "switch") != ctx.self()) throw Revert("request names another switch");
  auto code = abi::bytes_arg(args, "sup_code");
  auto vrs_sup = abi::signature_arg(args, "vrs_sup");
  if (sup_) throw Revert("supplementary contract already deployed");

  auto& agent = ctx.contract_as<AgentContract>(agent_);
  if (!agent.is_mailman(ctx.caller())) throw Revert("only a registered mailman may switch modes");
  try {
    if (recover_signer(abi::supplementary_digest(ctx.self(), code), vrs_sup) != sender_)
      throw Revert("supplementary code was not signed by the sender");
  } catch (const VerificationError&) {
    throw Revert("supplementary signature does not verify");
  }
  if (code != abi::supplementary_code(agent_)) throw Revert("unsupported supplementary code");

  auto agent_ctx = ctx.call_into(agent_);
  agent.mark_heavyweight(agent_ctx, ctx.self());
  auto addr = ctx.create(std::make_unique<SupplementaryContract>(agent_, ctx.self(), ctx.caller(), ctx.fee()));
  sup_ = addr;
  deployed_by_ = ctx.caller();
  ctx.emit("ModeSwitched", {{"switch", ctx.self().hex()}, {"sup", addr.hex()}, {"deployed_by", ctx.caller().hex()}});
}

nlohmann::json SwitchContract::state() const {
  return {{"agent", agent_.hex()},
          {"sender", sender_.hex()},
          {"sup", sup_ ? nlohmann::json(sup_->hex()) : nlohmann::json(nullptr)},
          {"deployed_by", deployed_by_ ? nlohmann::json(deployed_by_->hex()) : nlohmann::json(nullptr)}};
}

}  // namespace sd
