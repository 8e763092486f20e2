#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "silentdelivery/actors/driver.hpp"
#include "silentdelivery/analysis/availability.hpp"
#include "silentdelivery/analysis/cost.hpp"
#include "silentdelivery/analysis/sybil.hpp"

using namespace sd;
using boost::multiprecision::cpp_rational;

namespace {

// Exact A_S for a rational A_T, by direct summation of the binomial tail.
cpp_rational exact_availability(unsigned l, unsigned t, unsigned n, const cpp_rational& a_t) {
  cpp_rational keep = 1;
  for (unsigned i = 0; i < l; ++i) keep *= a_t;
  const cpp_rational loss = 1 - keep;
  cpp_rational tail = 0;
  for (unsigned i = n - t + 1; i <= n; ++i) {
    cpp_rational binom = 1;
    for (unsigned k = 1; k <= i; ++k) binom = binom * (n - i + k) / k;
    cpp_rational term = binom;
    for (unsigned k = 0; k < i; ++k) term *= loss;
    for (unsigned k = 0; k < n - i; ++k) term *= keep;
    tail += term;
  }
  return 1 - tail;
}

// The deposit formula written out independently of the library.
long double deposit_formula(unsigned l, long double v, long double d, unsigned t, unsigned n, long double p) {
  const long double x = v * p / (1 - p);
  return x * d * t / (n * std::pow(p, static_cast<long double>(l)));
}

long double golden_section(unsigned l, long double v, long double d, unsigned t, unsigned n) {
  const long double phi = (std::sqrt(5.0L) - 1) / 2;
  long double a = 1e-6L, b = 1 - 1e-6L;
  long double c = b - phi * (b - a), e = a + phi * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (deposit_formula(l, v, d, t, n, c) < deposit_formula(l, v, d, t, n, e)) b = e;
    else a = c;
    c = b - phi * (b - a);
    e = a + phi * (b - a);
  }
  return (a + b) / 2;
}

}  // namespace

TEST(Availability, MatchesExactRationalOracle) {
  const std::vector<std::pair<double, cpp_rational>> rates{
      {0.5, cpp_rational(1, 2)}, {0.9, cpp_rational(9, 10)}, {0.95, cpp_rational(19, 20)}, {1.0, cpp_rational(1)}};
  for (unsigned l = 1; l <= 4; ++l)
    for (unsigned n = 1; n <= 10; ++n)
      for (unsigned t = 1; t <= n; ++t)
        for (const auto& [a, exact] : rates) {
          const double oracle = static_cast<double>(exact_availability(l, t, n, exact));
          EXPECT_NEAR(static_cast<double>(availability(l, t, n, a)), oracle, 1e-13)
              << "l=" << l << " t=" << t << " n=" << n << " a=" << a;
        }
}

TEST(Availability, PublishedOperatingPoints) {
  const auto four = availability(4, 4, 10, 0.95);
  const auto three = availability(3, 4, 10, 0.95);
  EXPECT_GE(four, 0.9985L);
  EXPECT_LE(four, 0.9995L);
  EXPECT_GE(three, 0.99985L);
  EXPECT_LE(three, 0.99995L);
  EXPECT_EQ(availability(3, 4, 10, 1.0), 1.0L);
  EXPECT_NEAR(static_cast<double>(AvailabilityParams{3, 4, 10, 0.95}.share_loss()), 1 - std::pow(0.95, 3), 1e-15);
}

TEST(Availability, Monotonicity) {
  for (unsigned l = 1; l <= 4; ++l)
    for (unsigned t = 1; t <= 6; ++t)
      for (unsigned n = t; n <= 12; ++n) {
        const auto base = availability(l, t, n, 0.9);
        EXPECT_LE(base, availability(l, t, n + 1, 0.9) + 1e-18L);
        EXPECT_LE(base, availability(l, t, n, 0.95) + 1e-18L);
        EXPECT_GE(base, availability(l + 1, t, n, 0.9) - 1e-18L);
        if (t < n) {
          EXPECT_GE(base, availability(l, t + 1, n, 0.9) - 1e-18L);
        }
      }
}

TEST(Availability, DomainErrors) {
  EXPECT_THROW(availability(0, 1, 1, 0.9), std::invalid_argument);
  EXPECT_THROW(availability(1, 3, 2, 0.9), std::invalid_argument);
  EXPECT_THROW(availability(1, 1, 2, 1.5), std::invalid_argument);
  EXPECT_THROW(availability_mc(1, 1, 2, 0.5, 0, 1), std::invalid_argument);
}

TEST(AvailabilityMc, AgreesWithinThreeSigmaAndIsDeterministic) {
  for (unsigned l : {3u, 4u}) {
    const double p = static_cast<double>(availability(l, 4, 10, 0.95));
    auto mc = availability_mc(l, 4, 10, 0.95, 100000, 7);
    EXPECT_EQ(mc.trials, 100000u);
    EXPECT_LE(std::abs(mc.estimate - p), 3 * mc.sigma_at(p) + 1e-12);
    auto again = availability_mc(l, 4, 10, 0.95, 100000, 7);
    EXPECT_EQ(mc.successes, again.successes);
  }
  EXPECT_EQ(availability_mc(2, 2, 5, 0.0, 1000, 1).estimate, 0.0);
  EXPECT_EQ(availability_mc(2, 2, 5, 1.0, 1000, 1).estimate, 1.0);
}

TEST(Bribery, CostIsTLD) {
  EXPECT_EQ(bribery_cost(4, 3, 1.0L), 12.0L);
  for (unsigned t = 1; t <= 5; ++t) EXPECT_EQ(bribery_cost(t, 1, 2.5L), t * 2.5L);
  EXPECT_THROW(bribery_cost(0, 1, 1.0L), std::invalid_argument);
}

TEST(Sybil, ClosedForms) {
  for (std::uint32_t l = 2; l <= 6; ++l) EXPECT_EQ(optimal_sybil_fraction(l), Rational(l - 1, l));
  EXPECT_THROW(optimal_sybil_fraction(1), DegenerateCaseError);
  EXPECT_EQ(sybil_min_deposit(3, 100, 1.0L), 200.0L);
  EXPECT_EQ(optimal_sybil_count(3, 100), 200.0L);
  // Eq. (2) at p = 2/3 for l = 3: (v d t / n) * 27 / 4.
  EXPECT_NEAR(static_cast<double>(sybil_expected_deposit(3, 100, 1, 4, 10, 2.0L / 3)), 40.0 * 27 / 4, 1e-9);
}

TEST(Sybil, NumericMinimumMatchesGoldenSectionOracle) {
  for (std::uint32_t l = 2; l <= 6; ++l) {
    const auto num = minimize_sybil_numeric(l, 100, 1.0L, 4, 10);
    const long double p = static_cast<long double>(l - 1) / l;
    EXPECT_NEAR(static_cast<double>(num.argmin), static_cast<double>(p), 1e-6);
    EXPECT_NEAR(static_cast<double>(golden_section(l, 100, 1.0L, 4, 10)), static_cast<double>(p), 1e-6);
    const long double closed_min = 40.0L * std::pow(static_cast<long double>(l), l) / std::pow(static_cast<long double>(l - 1), l - 1);
    EXPECT_NEAR(static_cast<double>(num.min_expected_deposit / closed_min), 1.0, 1e-9);
    EXPECT_NEAR(static_cast<double>(num.deposit_at_argmin / sybil_min_deposit(l, 100, 1.0L)), 1.0, 1e-9);
  }
}

TEST(Cost, LightweightAnalytic) {
  for (std::uint32_t n : {5u, 10u, 20u, 50u}) {
    auto c = cost_report(CostMode::lightweight, n);
    EXPECT_EQ(c.total_gas, 754078u);
    EXPECT_EQ(c.total_usd, Rational(754078) * Rational(167, 10'000'000'000) * 175);
    ASSERT_TRUE(c.published_total_usd);
    EXPECT_EQ(*c.published_total_usd, Rational(221, 100));
    EXPECT_EQ(c.per_mailman_gas, 0u);
  }
  EXPECT_EQ(format_usd(cost_report(CostMode::lightweight, 5).total_usd), "$2.20");
}

TEST(Cost, HeavyweightIsAffineInN) {
  auto c = cost_report(CostMode::heavyweight, 10);
  EXPECT_EQ(c.fixed_gas, 616666u + 83121u + 2425356u + 54291u);
  EXPECT_EQ(c.per_mailman_gas, 72678u + 90689u);
  EXPECT_EQ(c.total_gas, c.fixed_gas + 10 * c.per_mailman_gas);
  ASSERT_TRUE(c.published_fixed_usd && c.published_per_mailman_usd);
  EXPECT_EQ(*c.published_fixed_usd, Rational(931, 100));
  EXPECT_EQ(*c.published_per_mailman_usd, Rational(48, 100));
  EXPECT_EQ(*cost_report(CostMode::heavyweight, 20).published_total_usd, Rational(1891, 100));
}

TEST(Cost, StrawmanGrowsLinearly) {
  auto a = cost_report(CostMode::strawman, 5), b = cost_report(CostMode::strawman, 10), c = cost_report(CostMode::strawman, 20);
  EXPECT_GT(b.total_gas, a.total_gas);
  EXPECT_EQ(c.total_gas - b.total_gas, 2 * (b.total_gas - a.total_gas));
  EXPECT_EQ(parse_cost_mode("strawman"), CostMode::strawman);
}

TEST(Cost, TraceReportMatchesGasSink) {
  ScenarioConfig cfg;
  cfg.seed = 12;
  cfg.pool_size = 12;
  cfg.l = 2;
  cfg.t = 2;
  cfg.n = 3;
  auto trace = run_scenario(cfg);
  auto c = cost_report(trace);
  EXPECT_EQ(c.mode, CostMode::lightweight);
  EXPECT_EQ(c.total_gas, 754078u);
  EXPECT_EQ(c.all_calls_fee, trace.gas_sink);
  EXPECT_EQ(c.all_calls_gas, trace.total_gas());

  const auto full = GasSchedule::defaults();
  GasSchedule partial;
  for (const auto& [name, e] : full.entries())
    if (name != "newService") partial.set(name, e);
  EXPECT_THROW(cost_report(trace, partial), UnknownFunctionError);
}
