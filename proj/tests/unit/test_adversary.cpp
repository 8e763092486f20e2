#include <gtest/gtest.h>

#include "silentdelivery/actors/driver.hpp"
#include "silentdelivery/adversary/attacks.hpp"
#include "silentdelivery/adversary/observer.hpp"
#include "silentdelivery/analysis/sybil.hpp"

using namespace sd;

namespace {

ScenarioConfig briberable_pool(std::uint32_t t, std::uint32_t l, std::uint32_t n) {
  ScenarioConfig c;
  c.seed = 3;
  c.t = t;
  c.l = l;
  c.n = n;
  c.pool_size = l * n;
  for (std::uint32_t i = 0; i < c.pool_size; ++i) c.pool_faults[i] = FaultPolicy::briberable;
  return c;
}

ScenarioConfig small(std::uint64_t seed) {
  ScenarioConfig c;
  c.seed = seed;
  c.pool_size = 12;
  c.l = 2;
  c.t = 2;
  c.n = 3;
  return c;
}

}  // namespace

TEST(Bribery, NobodySellsAtTheDeposit) {
  BriberyOptions o;
  o.bribe_per_key = kUnitsPerEther;
  auto r = run_bribery(briberable_pool(2, 2, 4), o);
  EXPECT_EQ(r.keys_bought, 0u);
  EXPECT_EQ(r.total_spent, 0);
  EXPECT_FALSE(r.key_recovered);
  EXPECT_GT(r.offers, 0u);
  EXPECT_EQ(r.trace.outcome, ServiceStatus::delivered_light);
}

TEST(Bribery, JustAboveTheDepositBuysTLKeys) {
  for (auto [t, l] : {std::pair{2u, 2u}, std::pair{4u, 3u}}) {
    BriberyOptions o;
    o.bribe_per_key = kUnitsPerEther + kUnitsPerEther / 400;
    auto r = run_bribery(briberable_pool(t, l, t + 2), o);
    EXPECT_TRUE(r.key_recovered);
    EXPECT_EQ(r.shares_obtained, t);
    EXPECT_EQ(r.keys_bought, t * l);
    EXPECT_EQ(r.total_spent, static_cast<Amount>(t * l) * o.bribe_per_key);
    const double tld = bribery_cost(t, l, 1.0L);
    EXPECT_LE(static_cast<double>(r.total_spent) / kUnitsPerEther, tld * 1.02);
    // Every sold key is published, reported and its deposit seized.
    EXPECT_EQ(r.deposits_forfeited, static_cast<Amount>(t * l) * kUnitsPerEther);
    EXPECT_TRUE(r.trace.conserved);
  }
}

TEST(Bribery, HiddenRecruitmentCostsMore) {
  auto c = briberable_pool(4, 3, 10);
  c.pool_size = 100;
  for (std::uint32_t i = 0; i < c.pool_size; ++i) c.pool_faults[i] = FaultPolicy::briberable;
  BriberyOptions o;
  o.bribe_per_key = kUnitsPerEther + kUnitsPerEther / 100;
  o.side_channel = false;
  auto r = run_bribery(c, o);
  EXPECT_GT(static_cast<double>(r.total_spent) / kUnitsPerEther, 2 * bribery_cost(4, 3, 1.0L));
}

TEST(Sybil, SimulatedAttackCapturesOnlyFullyAdversarialShares) {
  ScenarioConfig c;
  c.seed = 5;
  c.pool_size = 100;
  auto r = run_sybil(c, 200);
  EXPECT_LE(r.shares_obtained, c.n);
  EXPECT_EQ(r.total_spent, 200 * c.deposit);
  EXPECT_EQ(r.key_recovered, r.shares_obtained >= c.t);
  auto none = run_sybil(c, 0);
  EXPECT_EQ(none.shares_obtained, 0u);
  EXPECT_FALSE(none.key_recovered);
}

TEST(SybilMonteCarlo, CaptureRateFollowsLayering) {
  auto est = sybil_monte_carlo(2, 2, 5, 100, 100, 1.0, 4000, 3);
  const double p = 0.5;
  EXPECT_NEAR(est.share_capture_rate, p * p, 0.02);
  EXPECT_NEAR(est.mean_captured, 5 * p * p, 0.1);
  EXPECT_NEAR(est.expected_deposit, 100 * 1.0 * 2 / est.mean_captured, 1e-9);
  auto again = sybil_monte_carlo(2, 2, 5, 100, 100, 1.0, 4000, 3);
  EXPECT_EQ(est.mean_captured, again.mean_captured);
  EXPECT_EQ(sybil_monte_carlo(2, 2, 5, 100, 0, 1.0, 200, 3).mean_captured, 0.0);
}

TEST(InjectFault, ValidatesPositionAndKind) {
  auto c = small(1);
  inject_fault(c, 6, FaultPolicy::fake);
  EXPECT_EQ(c.recruit_faults.at(6), FaultPolicy::fake);
  EXPECT_THROW(inject_fault(c, 7, FaultPolicy::absent), UnknownMailmanError);
  EXPECT_THROW(inject_fault(c, 0, FaultPolicy::absent), UnknownMailmanError);
  EXPECT_THROW(inject_fault(c, 1, FaultPolicy::honest), std::invalid_argument);
  inject_fault(c, 2, FaultPolicy::premature);
  auto trace = run_scenario(c);
  EXPECT_TRUE(trace.misbehaved(trace.recruited[1]));
}

TEST(Observer, LightweightRunRevealsNoBinding) {
  auto trace = run_scenario(small(8));
  ASSERT_EQ(trace.outcome, ServiceStatus::delivered_light);
  EXPECT_TRUE(service_bindings(adversary_view(trace, ViewPoint::delivery), trace).empty());
}

TEST(Observer, HeavyweightRunRevealsBindings) {
  auto c = small(9);
  c.recruit_faults = {{1, FaultPolicy::premature}};
  auto trace = run_scenario(c);
  ASSERT_EQ(trace.mode, ServiceMode::heavyweight);
  auto b = service_bindings(adversary_view(trace, ViewPoint::delivery), trace);
  EXPECT_FALSE(b.empty());
  bool onchain = false;
  for (const auto& x : b) onchain = onchain || x.source == "onchain";
  EXPECT_TRUE(onchain);
}

TEST(Observer, StrawmanRevealsBindings) {
  auto c = small(10);
  c.variant = ProtocolVariant::strawman;
  auto trace = run_scenario(c);
  auto b = service_bindings(adversary_view(trace, ViewPoint::delivery), trace);
  EXPECT_GE(b.size(), c.n);
}

TEST(Observer, PrivatePayloadsStayHidden) {
  auto trace = run_scenario(small(11));
  auto view = adversary_view(trace);
  for (const auto& m : view.messages)
    if (m.to) {
      EXPECT_FALSE(m.payload.has_value());
    }
  auto profile = traffic_profile(view);
  EXPECT_EQ(profile.dump().find(trace.recruited.front().hex()), std::string::npos);
}
