#include <gtest/gtest.h>

#include "silentdelivery/actors/driver.hpp"
#include "silentdelivery/contracts/abi.hpp"
#include "silentdelivery/contracts/supplementary.hpp"
#include "silentdelivery/contracts/switch.hpp"
#include "silentdelivery/crypto/hash.hpp"

using namespace sd;

namespace {

ScenarioConfig small_config(std::uint64_t seed = 5) {
  ScenarioConfig c;
  c.seed = seed;
  c.pool_size = 12;
  c.l = 2;
  c.t = 2;
  c.n = 3;
  c.lead_ticks = 3;
  return c;
}

Amount fees_paid(const ScenarioTrace& trace, const Address& a) {
  Amount f = 0;
  for (const auto& r : trace.receipts)
    if (r.caller == a) f += r.fee;
  return f;
}

const TxReceipt* find_call(const ScenarioTrace& trace, std::string_view function) {
  for (const auto& r : trace.receipts)
    if (r.function == function) return &r;
  return nullptr;
}

std::uint32_t service_epoch(const Simulation& sim) { return sim.service().epoch; }

void advance_to_epoch(Simulation& sim, std::uint32_t epoch) {
  for (int guard = 0; guard < 50 && service_epoch(sim) != epoch; ++guard) sim.ledger().advance_to_tick(sim.ledger().tick() + 1);
  ASSERT_EQ(service_epoch(sim), epoch);
}

nlohmann::json deploy_args(const MailmanActor& m) {
  return {{"switch", m.switch_addr.hex()}, {"sup_code", to_hex(m.sup_code)}, {"vrs_sup", m.vrs_sup.hex()}};
}

}  // namespace

TEST(Agent, NewServiceRecordsNoMailmen) {
  Simulation sim(small_config());
  sim.setup();
  auto state = sim.agent_contract().state();
  const std::string services = state.at("services").dump();
  for (std::uint32_t p = 1; p <= 6; ++p)
    EXPECT_EQ(services.find(sim.recruit(p).account.address.hex()), std::string::npos);
  bool found = false;
  for (const auto& r : sim.ledger().receipts())
    if (r.function == "newService") {
      found = true;
      EXPECT_EQ(r.gas_used, 83121u);
      EXPECT_TRUE(r.success);
    }
  EXPECT_TRUE(found);
  EXPECT_EQ(sim.service().spec.status, ServiceStatus::pending);
  EXPECT_EQ(sim.service().spec.sup_addr, SwitchContract::predict_supplementary(sim.service().spec.switch_addr));
}

TEST(Agent, RegistrationRules) {
  Simulation sim(small_config());
  sim.setup();
  auto& ledger = sim.ledger();
  const auto& m = sim.pool().front();
  auto dup = ledger.submit_tx(m.account.address, sim.agent(), "newMailman", nlohmann::json::object(), kUnitsPerEther);
  EXPECT_FALSE(dup.success);
  EXPECT_EQ(dup.error, "mailman already registered");

  Rng rng(77);
  auto fresh = ledger.create_eoa(rng);
  ledger.fund(fresh.address, 5 * kUnitsPerEther);
  auto low = ledger.submit_tx(fresh.address, sim.agent(), "newMailman", nlohmann::json::object(), kUnitsPerEther / 2);
  EXPECT_FALSE(low.success);
  EXPECT_EQ(low.error, "deposit below the minimum");
  EXPECT_TRUE(ledger.conserved());
}

TEST(Agent, NewServiceRejectsThresholdAboveShares) {
  Simulation sim(small_config());
  sim.setup();
  auto& ledger = sim.ledger();
  const auto sender = sim.sender().account.address;
  auto sw = *ledger.deploy_contract(sender, std::make_unique<SwitchContract>(sim.agent(), sender), "deploySwitch").created;
  nlohmann::json args{{"timeframe", sd::abi::encode(ledger.frame_of(ledger.tick() + 5))},
                      {"l", 3},
                      {"t", 5},
                      {"n", 4},
                      {"switch", sw.hex()},
                      {"sup", SwitchContract::predict_supplementary(sw).hex()},
                      {"recipient", sim.recipient().account.address.hex()},
                      {"receipt_hash", hash256(ByteView{}).hex()}};
  auto r = ledger.submit_tx(sender, sim.agent(), "newService", args, kUnitsPerEther / 10);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.error, "threshold must satisfy 1 <= t <= n");
  EXPECT_EQ(r.gas_used, 83121u);
  args["t"] = 4;
  EXPECT_TRUE(ledger.submit_tx(sender, sim.agent(), "newService", args, kUnitsPerEther / 10).success);
}

TEST(Switch, DeploySupplementaryOnceAtPredictedAddress) {
  Simulation sim(small_config());
  sim.setup();
  auto& ledger = sim.ledger();
  auto& m1 = sim.recruit(1);
  auto& m2 = sim.recruit(2);

  auto forged = deploy_args(m1);
  Rng rng(8);
  auto impostor = keypair_gen(rng);
  forged["vrs_sup"] = sign(impostor, sd::abi::supplementary_digest(m1.switch_addr, m1.sup_code)).hex();
  auto bad = ledger.submit_tx(m1.account.address, m1.switch_addr, "deploySupplementary", forged);
  EXPECT_FALSE(bad.success);

  auto first = ledger.submit_tx(m1.account.address, m1.switch_addr, "deploySupplementary", deploy_args(m1));
  ASSERT_TRUE(first.success) << first.error;
  EXPECT_EQ(first.gas_used, 2425356u);
  EXPECT_TRUE(ledger.exists(sim.service().spec.sup_addr));
  EXPECT_EQ(sim.service().mode, ServiceMode::heavyweight);
  EXPECT_EQ(*ledger.contract_as<SwitchContract>(m1.switch_addr)->deployed_by(), m1.account.address);

  const auto before = ledger.balance(m2.account.address);
  auto second = ledger.submit_tx(m2.account.address, m2.switch_addr, "deploySupplementary", deploy_args(m2));
  EXPECT_FALSE(second.success);
  EXPECT_EQ(ledger.balance(m2.account.address), before - 2425356 * 167);
}

TEST(Supplementary, ScriptedHeavyweightLifecycle) {
  Simulation sim(small_config());
  sim.setup();
  auto& ledger = sim.ledger();
  const auto sup = sim.service().spec.sup_addr;
  auto& m1 = sim.recruit(1);
  auto& m2 = sim.recruit(2);
  auto& m3 = sim.recruit(3);
  ASSERT_TRUE(ledger.submit_tx(m1.account.address, m1.switch_addr, "deploySupplementary", deploy_args(m1)).success);

  // Epoch 0: premature report with m1's real key, then the duplicate.
  nlohmann::json report{{"index", 1}, {"privkey", m1.frame_key.secret.hex()}};
  EXPECT_TRUE(ledger.submit_tx(m2.account.address, sup, "reportPremature", report).success);
  auto dup = ledger.submit_tx(m3.account.address, sup, "reportPremature", report);
  EXPECT_FALSE(dup.success);
  EXPECT_EQ(dup.error, "key already reported");
  auto early = ledger.submit_tx(m1.account.address, sup, "revealPrivkey", {{"index", 1}, {"privkey", m1.frame_key.secret.hex()}});
  EXPECT_FALSE(early.success);

  advance_to_epoch(sim, 2);
  nlohmann::json list = nlohmann::json::array();
  for (std::uint32_t p = 1; p <= 3; ++p) list.push_back(sd::abi::encode(Agreement{p, sim.recruit(p).vrs_s, sim.recruit(p).vrs_m}));
  auto tampered = list;
  tampered[1] = sd::abi::encode(Agreement{2, sim.recruit(3).vrs_s, sim.recruit(2).vrs_m});
  auto rej = ledger.submit_tx(m1.account.address, sup, "revealIdentity", {{"agreements", tampered}});
  EXPECT_FALSE(rej.success);
  EXPECT_TRUE(ledger.contract_as<SupplementaryContract>(sup)->identities().empty());
  auto ok = ledger.submit_tx(m1.account.address, sup, "revealIdentity", {{"agreements", list}});
  ASSERT_TRUE(ok.success) << ok.error;
  EXPECT_EQ(ok.gas_used, 3u * 72678u);

  advance_to_epoch(sim, 3);
  EXPECT_TRUE(ledger.submit_tx(m1.account.address, sup, "revealPrivkey", {{"index", 1}, {"privkey", m1.frame_key.secret.hex()}}).success);
  Rng rng(13);
  auto wrong = box_keypair(rng).secret;
  auto fake = ledger.submit_tx(m3.account.address, sup, "revealPrivkey", {{"index", 3}, {"privkey", wrong.hex()}});
  EXPECT_TRUE(fake.success);
  EXPECT_EQ(fake.gas_used, 90689u);
  EXPECT_FALSE(ledger.contract_as<SupplementaryContract>(sup)->privkeys().at(3).matches);

  advance_to_epoch(sim, 4);
  auto unjust = ledger.submit_tx(m2.account.address, sup, "reportAbsent", {{"index", 1}});
  EXPECT_FALSE(unjust.success);
  auto absent = ledger.submit_tx(m1.account.address, sup, "reportAbsent", {{"index", 2}});
  EXPECT_TRUE(absent.success) << absent.error;
  EXPECT_EQ(absent.gas_used, 65343u);
  auto fake_report = ledger.submit_tx(m1.account.address, sup, "reportFake", {{"index", 3}});
  EXPECT_TRUE(fake_report.success) << fake_report.error;
  EXPECT_EQ(fake_report.gas_used, 1280723u);
  auto inform = ledger.submit_tx(m1.account.address, sup, "informAgent");
  EXPECT_TRUE(inform.success) << inform.error;
  EXPECT_EQ(inform.gas_used, 57042u);

  const auto& agent = sim.agent_contract();
  EXPECT_EQ(agent.mailman(m1.account.address)->status, MailmanStatus::slashed);
  EXPECT_EQ(agent.mailman(m2.account.address)->status, MailmanStatus::slashed);
  EXPECT_EQ(agent.mailman(m3.account.address)->status, MailmanStatus::slashed);
  EXPECT_EQ(agent.mailman(sim.recruit(4).account.address)->status, MailmanStatus::active);
  EXPECT_TRUE(ledger.conserved());
}

TEST(Agent, RecipientReceiptChecks) {
  Simulation sim(small_config());
  sim.setup();
  auto& ledger = sim.ledger();
  advance_to_epoch(sim, 1);
  const auto& sender = sim.sender();
  const auto rcpt = sim.recipient().account.address;
  nlohmann::json args{{"receipt", sender.receipt.hex()}, {"sender", sender.account.address.hex()},
                      {"switch", sender.switch_addr.hex()}};
  auto wrong = args;
  FixedBytes<32> junk;
  junk.bytes.fill(3);
  wrong["receipt"] = junk.hex();
  EXPECT_EQ(ledger.submit_tx(rcpt, sim.agent(), "recipientReceipt", wrong).error, "receipt does not match its commitment");
  EXPECT_EQ(ledger.submit_tx(sim.recruit(1).account.address, sim.agent(), "recipientReceipt", args).error,
            "caller is not the recipient");
  auto ok = ledger.submit_tx(rcpt, sim.agent(), "recipientReceipt", args);
  EXPECT_TRUE(ok.success);
  EXPECT_EQ(ok.gas_used, 54291u);
  EXPECT_EQ(format_usd(ok.usd), "$0.16");
  EXPECT_EQ(sim.service().spec.status, ServiceStatus::delivered_light);
  EXPECT_EQ(sim.service().epoch, 6u);
}

TEST(Agent, LightweightSuccessSplitsRemunerationEqually) {
  Simulation sim(small_config(21));
  auto trace = sim.run();
  ASSERT_EQ(trace.outcome, ServiceStatus::delivered_light);
  EXPECT_EQ(trace.epoch_path, (std::vector<std::uint32_t>{0, 1, 6}));
  const Amount share = trace.recruited.empty() ? 0 : kUnitsPerEther / static_cast<Amount>(trace.recruited.size());
  for (const auto& a : trace.recruited) {
    EXPECT_EQ(trace.remunerated.at(a), share);
    EXPECT_EQ(trace.payoff(a) + fees_paid(trace, a), share);
  }
  for (const auto& a : trace.pool) {
    if (std::find(trace.recruited.begin(), trace.recruited.end(), a) != trace.recruited.end()) continue;
    EXPECT_EQ(trace.payoff(a) + fees_paid(trace, a), 0);
  }
  EXPECT_TRUE(trace.slashes.empty());
  EXPECT_TRUE(trace.conserved);

  auto again = sim.ledger().submit_tx(trace.recruited.front(), sim.agent(), "withdraw");
  EXPECT_FALSE(again.success);
  EXPECT_EQ(again.error, "nothing to withdraw");
}

TEST(Agent, FailedServiceReturnsDeposits) {
  auto c = small_config(4);
  c.l = 1;
  c.t = 3;
  c.n = 3;
  c.recruit_faults = {{1, FaultPolicy::absent}, {2, FaultPolicy::absent}};
  auto trace = run_scenario(c);
  EXPECT_EQ(trace.outcome, ServiceStatus::failed);
  EXPECT_FALSE(trace.info_matches);
  for (const auto& a : trace.recruited) {
    if (trace.misbehaved(a)) continue;
    EXPECT_EQ(trace.payoff(a) + fees_paid(trace, a), 0) << "honest mailman lost money";
  }
  EXPECT_TRUE(trace.remunerated.empty());
  EXPECT_EQ(trace.payoff(trace.sender) + fees_paid(trace, trace.sender), 0);
  EXPECT_TRUE(trace.conserved);
}

TEST(Supplementary, PrematureLeakIsSlashedAndReporterRewarded) {
  auto c = small_config(6);
  c.recruit_faults = {{2, FaultPolicy::premature}};
  auto trace = run_scenario(c);
  ASSERT_EQ(trace.slashes.size(), 1u);
  EXPECT_EQ(trace.slashes[0].mailman, trace.recruited[1]);
  EXPECT_EQ(trace.slashes[0].reason, "premature");
  EXPECT_EQ(trace.slashes[0].amount, kUnitsPerEther);
  EXPECT_EQ(trace.slashes[0].reward, kUnitsPerEther / 2);
  EXPECT_EQ(trace.mode, ServiceMode::heavyweight);
  ASSERT_NE(find_call(trace, "deploySupplementary"), nullptr);
  EXPECT_TRUE(trace.conserved);
}

TEST(Supplementary, FalseReporterLosesDeposit) {
  auto c = small_config(7);
  c.recruit_faults = {{3, FaultPolicy::false_reporter}};
  auto trace = run_scenario(c);
  ASSERT_EQ(trace.slashes.size(), 1u);
  EXPECT_EQ(trace.slashes[0].mailman, trace.recruited[2]);
  EXPECT_EQ(trace.slashes[0].reason, "false_report");
  EXPECT_EQ(trace.slashes[0].reward, 0);
  EXPECT_TRUE(trace.conserved);
}
