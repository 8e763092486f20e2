// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "silentdelivery/actors/driver.hpp"
#include "silentdelivery/adversary/attacks.hpp"
#include "silentdelivery/analysis/availability.hpp"
#include "silentdelivery/analysis/cost.hpp"
#include "silentdelivery/analysis/sybil.hpp"
#include "silentdelivery/crypto/errors.hpp"
#include "silentdelivery/crypto/onion.hpp"
#include "silentdelivery/crypto/shamir.hpp"
#include "silentdelivery/crypto/signature.hpp"

using namespace sd;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. Service availability.
Verdict availability_criterion() {
  Verdict v;
  const auto t0 = Clock::now();
  const double four = static_cast<double>(availability(4, 4, 10, 0.95));
  const double three = static_cast<double>(availability(3, 4, 10, 0.95));
  v.check(four >= 0.9985 && four <= 0.9995, "A_S(4,4,10,.95) in [0.9985, 0.9995]");
  v.check(three >= 0.99985 && three <= 0.99995, "A_S(3,4,10,.95) in [0.99985, 0.99995]");
  v.detail << "A_S(l=4)=" << four << " A_S(l=3)=" << three;
  for (auto [l, p] : {std::pair{4u, four}, std::pair{3u, three}}) {
    auto mc = availability_mc(l, 4, 10, 0.95, 100000, 2024 + l);
    const double z = std::abs(mc.estimate - p) / mc.sigma_at(p);
    v.detail << " mc(l=" << l << ")=" << mc.estimate << " z=" << z;
    v.check(z <= 3.0, "Monte Carlo within 3 sigma for l=" + std::to_string(l));
  }
  const double s = seconds_since(t0);
  v.detail << " time=" << s << "s";
  v.check(s < 5.0, "runtime under 5 s");
  return v;
}

// 2. Sybil optimum.
Verdict sybil_criterion() {
  Verdict v;
  const auto t0 = Clock::now();
  bool fractions = true;
  for (std::uint32_t l = 2; l <= 6; ++l) fractions = fractions && optimal_sybil_fraction(l) == Rational(l - 1, l);
  v.check(fractions, "optimal fraction (l-1)/l for l=2..6");

  double worst_arg = 0, worst_dep = 0;
  for (std::uint32_t l = 2; l <= 6; ++l) {
    const auto num = minimize_sybil_numeric(l, 100, 1.0L, 4, 10);
    const long double p = static_cast<long double>(l - 1) / l;
    worst_arg = std::max(worst_arg, static_cast<double>(std::abs(num.argmin - p)));
    const long double bound = sybil_min_deposit(l, 100, 1.0L);
    worst_dep = std::max(worst_dep, static_cast<double>(std::abs(num.deposit_at_argmin - bound) / bound));
  }
  v.check(worst_arg <= 1e-6, "numeric argmin within 1e-6");
  v.check(worst_dep <= 1e-9, "deposit at argmin equals (l-1)vd to 1e-9");
  v.detail << "max|argmin-(l-1)/l|=" << worst_arg << " max rel err x*d vs (l-1)vd=" << worst_dep;

  double best = 1e300;
  std::uint32_t best_x = 0;
  for (std::uint32_t x = 50; x <= 500; x += 10) {
    auto est = sybil_monte_carlo(3, 4, 10, 100, x, 1.0, 10000, 77);
    if (est.expected_deposit < best) {
      best = est.expected_deposit;
      best_x = x;
    }
  }
  v.detail << " empirical argmin x=" << best_x << " (deposit " << best << ")";
  v.check(best_x >= 170 && best_x <= 230, "empirical argmin within 15% of x=200");
  const double s = seconds_since(t0);
  v.detail << " time=" << s << "s";
  v.check(s < 60.0, "runtime under 60 s");
  return v;
}

// 3. Bribery bound.
Verdict bribery_criterion() {
  Verdict v;
  for (auto [t, l] : {std::pair{2u, 2u}, std::pair{4u, 3u}}) {
    ScenarioConfig c;
    c.seed = 31;
    c.t = t;
    c.l = l;
    c.n = t + 2;
    c.pool_size = l * c.n;
    for (std::uint32_t i = 0; i < c.pool_size; ++i) c.pool_faults[i] = FaultPolicy::briberable;
    const double tld = static_cast<double>(bribery_cost(t, l, 1.0L));
    std::optional<double> spend;
    double premium = 0;
    for (int step = 0; step <= 8 && !spend; ++step) {
      premium = step * 0.0025;
      BriberyOptions o;
      o.bribe_per_key = kUnitsPerEther + static_cast<Amount>(std::llround(premium * kUnitsPerEther));
      auto r = run_bribery(c, o);
      if (r.key_recovered) spend = static_cast<double>(r.total_spent) / kUnitsPerEther;
    }
    v.detail << "(t=" << t << ",l=" << l << ") tld=" << tld;
    if (!spend) {
      v.check(false, "no successful bribery up to a 2% premium");
      continue;
    }
    v.detail << " min spend=" << *spend << " at premium " << premium * 100 << "%; ";
    v.check(*spend >= tld && *spend <= tld * 1.02, "spend within 2% of t*l*d");
  }
  return v;
}

ScenarioConfig light_config(std::uint32_t n, ProtocolVariant variant = ProtocolVariant::silent) {
  ScenarioConfig c;
  c.seed = 101;
  c.variant = variant;
  c.l = 3;
  c.t = 4;
  c.n = n;
  c.pool_size = c.l * n;
  return c;
}

// 4. Cost model.
Verdict cost_criterion() {
  Verdict v;
  const auto honest = run_scenario(light_config(10));
  v.check(honest.outcome == ServiceStatus::delivered_light, "honest run delivers in lightweight mode");
  v.check(honest.service_gas() == 754078, "lightweight gas 754078");
  const auto usd = format_usd(honest.service_usd());
  const auto table = cost_report(CostMode::lightweight, 10);
  v.detail << "light gas=" << honest.service_gas() << " usd=" << usd << " (exact " << to_double(honest.service_usd())
           << ", published-row sum " << format_usd(*table.published_total_usd) << ")";
  v.check(usd == "$2.21", "lightweight USD $2.21 at 1.67e-8 ether/gas and 175 USD/ether");

  for (std::uint32_t n : {5u, 10u, 20u}) {
    ScenarioConfig c;
    c.seed = 202;
    c.l = 1;
    c.t = 3;
    c.n = n;
    c.pool_size = n;
    for (std::uint32_t p = 1; p <= n - c.t + 1; ++p) c.recruit_faults[p] = FaultPolicy::withhold_light;
    const auto heavy = run_scenario(c);
    const double got = to_double(heavy.service_usd());
    const double want = 9.31 + 0.48 * n;
    const auto report = cost_report(heavy);
    v.detail << " | heavy n=" << n << " outcome=" << to_string(heavy.outcome) << " usd=" << got << " want=" << want;
    if (report.published_total_usd) v.detail << " published-row sum=" << to_double(*report.published_total_usd);
    v.check(heavy.outcome == ServiceStatus::delivered_heavy, "heavyweight run n=" + std::to_string(n) + " delivers");
    v.check(std::abs(got - want) <= 0.01, "heavyweight USD n=" + std::to_string(n) + " within $0.01 of 9.31+0.48n");
  }

  std::set<std::uint64_t> light_gas;
  std::vector<std::pair<double, double>> straw;
  for (std::uint32_t n : {5u, 10u, 20u, 50u}) {
    light_gas.insert(run_scenario(light_config(n)).service_gas());
    straw.emplace_back(n, static_cast<double>(run_scenario(light_config(n, ProtocolVariant::strawman)).service_gas()));
  }
  v.check(light_gas.size() == 1, "lightweight gas identical across n in {5,10,20,50}");
  const double slope = (straw[1].second - straw[0].second) / (straw[1].first - straw[0].first);
  bool linear = slope > 0;
  for (std::size_t i = 1; i < straw.size(); ++i)
    linear = linear && std::abs((straw[i].second - straw[0].second) - slope * (straw[i].first - straw[0].first)) < 0.5;
  v.check(linear, "strawman gas linear in n with positive slope");
  v.detail << " | light gas set size=" << light_gas.size() << " strawman slope=" << slope << " gas/mailman";
  return v;
}

bool valid_epoch_path(const std::vector<std::uint32_t>& path) {
  static const std::set<std::pair<std::uint32_t, std::uint32_t>> edges{{0, 1}, {0, 2}, {1, 6}, {1, 2}, {2, 3},
                                                                      {2, 6}, {3, 4}, {4, 5}, {5, 6}};
  if (path.empty() || path.front() != 0 || path.back() != 6) return false;
  for (std::size_t i = 1; i < path.size(); ++i)
    if (!edges.count({path[i - 1], path[i]})) return false;
  return true;
}

bool slash_explained(const ScenarioTrace& trace, const SlashRecord& s) {
  std::set<std::string> kinds;
  if (s.reason == "premature") kinds = {"premature"};
  else if (s.reason == "absent") kinds = {"absent", "unavailable"};
  else if (s.reason == "fake") kinds = {"fake_key"};
  else if (s.reason == "false_report") kinds = {"false_report"};
  for (const auto& m : trace.misbehavior)
    if (m.mailman == s.mailman && kinds.count(m.kind)) return true;
  return false;
}

// 5. Epoch graph and fairness over a fuzz corpus.
Verdict fuzz_criterion() {
  Verdict v;
  const auto t0 = Clock::now();
  Rng rng(5150);
  const std::vector<FaultPolicy> faults{FaultPolicy::honest,      FaultPolicy::premature,      FaultPolicy::absent,
                                        FaultPolicy::fake,        FaultPolicy::withhold_light, FaultPolicy::false_reporter,
                                        FaultPolicy::refuse};
  int bad_path = 0, honest_slashed = 0, pay_mismatch = 0, unexplained = 0, not_conserved = 0, errors = 0;
  std::map<std::string, int> outcomes;
  const int corpus = 1000;
  for (int i = 0; i < corpus; ++i) {
    ScenarioConfig c;
    c.seed = rng();
    c.variant = rng.uniform(0, 9) == 0 ? ProtocolVariant::strawman : ProtocolVariant::silent;
    c.l = static_cast<std::uint32_t>(rng.uniform(1, 3));
    c.n = static_cast<std::uint32_t>(rng.uniform(1, 6));
    c.t = static_cast<std::uint32_t>(rng.uniform(1, c.n));
    c.pool_size = c.recruited() + static_cast<std::uint32_t>(rng.uniform(0, 6));
    const double rates[] = {1.0, 1.0, 0.95, 0.8};
    c.availability = rates[rng.uniform(0, 3)];
    // Refusers beyond the spare pool would leave recruitment unfinishable,
    // which is a setup precondition rather than a protocol property.
    std::uint32_t refusers = 0;
    const std::uint32_t spare = c.pool_size - c.recruited();
    for (std::uint32_t p = 0; p < c.pool_size; ++p) {
      if (!rng.bernoulli(0.3)) continue;
      auto policy = faults[rng.uniform(1, faults.size() - 1)];
      if (policy == FaultPolicy::refuse && refusers++ >= spare) policy = FaultPolicy::honest;
      c.pool_faults[p] = policy;
    }
    try {
      const auto trace = run_scenario(c);
      ++outcomes[to_string(trace.outcome)];
      if (c.variant == ProtocolVariant::silent && !valid_epoch_path(trace.epoch_path)) ++bad_path;
      std::set<Address> slashed;
      for (const auto& s : trace.slashes) {
        slashed.insert(s.mailman);
        if (!slash_explained(trace, s)) ++unexplained;
      }
      for (const auto& [a, policy] : trace.policies)
        if (policy == FaultPolicy::honest && !trace.misbehaved(a) && slashed.count(a)) ++honest_slashed;
      Amount paid = 0;
      for (const auto& [_, amount] : trace.remunerated) paid += amount;
      const bool delivered =
          trace.outcome == ServiceStatus::delivered_light || trace.outcome == ServiceStatus::delivered_heavy;
      if (delivered != (paid > 0)) ++pay_mismatch;
      if (!trace.conserved) ++not_conserved;
    } catch (const std::exception& e) {
      ++errors;
      if (errors <= 3) v.detail << " [run " << i << " threw: " << e.what() << "]";
    }
  }
  v.check(errors == 0, "every scenario runs");
  v.check(bad_path == 0, "(a) epoch paths follow the epoch graph");
  v.check(honest_slashed == 0, "(b) no honest mailman slashed");
  v.check(pay_mismatch == 0, "(c) remuneration iff delivered");
  v.check(unexplained == 0, "(d) every slash maps to a misbehavior");
  v.check(not_conserved == 0, "(e) conservation");
  const double s = seconds_since(t0);
  v.check(s < 600.0, "runtime under 10 min");
  v.detail << corpus << " scenarios; outcomes:";
  for (const auto& [k, n] : outcomes) v.detail << " " << k << "=" << n;
  v.detail << "; bad paths=" << bad_path << " honest slashed=" << honest_slashed << " pay mismatches=" << pay_mismatch
           << " unexplained slashes=" << unexplained << " unconserved=" << not_conserved << " time=" << s << "s";
  return v;
}

// 6. Crypto kernel oracles.
Verdict crypto_criterion() {
  Verdict v;
  const auto& f = PrimeField::small();
  Rng rng(606);
  std::uint64_t subsets = 0, subset_failures = 0;
  for (unsigned n = 1; n <= 6; ++n)
    for (unsigned t = 1; t <= n; ++t) {
      const BigInt secret = f.random(rng);
      std::vector<BigInt> coeffs;
      for (unsigned k = 1; k < t; ++k) coeffs.push_back(f.random(rng));
      const auto shares = split_with_coefficients(secret, coeffs, n, f);
      for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<Share> subset;
        for (unsigned i = 0; i < n; ++i)
          if (mask & (1u << i)) subset.push_back(shares[i]);
        ++subsets;
        if (subset.size() >= t) {
          if (restore_value(subset, t, f) != secret) ++subset_failures;
        } else {
          try {
            restore_value(subset, t, f);
            ++subset_failures;
          } catch (const InsufficientSharesError&) {
          }
        }
      }
    }
  v.check(subset_failures == 0, "Shamir subset identity");

  std::uint64_t orders = 0, order_failures = 0;
  const Share share{1, 4242, 0};
  for (unsigned l = 1; l <= 3; ++l) {
    std::vector<BoxKeyPair> kps;
    std::vector<BoxPublicKey> pubs;
    for (unsigned i = 0; i < l; ++i) {
      kps.push_back(box_keypair(rng));
      pubs.push_back(kps.back().pub);
    }
    const auto onion = onion_wrap(share, pubs, rng);
    std::vector<unsigned> order(l);
    std::iota(order.begin(), order.end(), 0u);
    do {
      bool expect_ok = true;
      for (unsigned i = 0; i < l; ++i) expect_ok = expect_ok && order[i] == l - 1 - i;
      bool ok = true;
      Onion o = onion;
      try {
        for (unsigned i : order) o = onion_peel(o, kps[i].secret);
        ok = onion_share(o) == share;
      } catch (const CryptoError&) {
        ok = false;
      }
      ++orders;
      if (ok != expect_ok) ++order_failures;
    } while (std::next_permutation(order.begin(), order.end()));
  }
  v.check(order_failures == 0, "onion peel orders");

  int sig_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto kp = keypair_gen(rng);
    const auto digest = Digest256::from(rng.fixed<32>());
    const auto sig = sign(kp, digest);
    bool ok = recover_signer(digest, sig) == kp.address;
    auto other = digest;
    other.bytes[i % 32] ^= 0x01;
    try {
      recover_signer(other, sig);
      ok = false;
    } catch (const VerificationError&) {
    }
    if (!ok) ++sig_failures;
  }
  v.check(sig_failures == 0, "signature round trips");
  v.detail << subsets << " share subsets, " << orders << " peel orders, 1000 signatures; failures " << subset_failures
           << "/" << order_failures << "/" << sig_failures;
  return v;
}

// 7. Relationship secrecy.
Verdict secrecy_criterion() {
  Verdict v;
  auto run_pair = [](ProtocolVariant variant) {
    ScenarioConfig c;
    c.seed = 707;
    c.variant = variant;
    c.l = 2;
    c.t = 2;
    c.n = 3;
    c.pool_size = 16;
    std::vector<std::uint32_t> a(c.recruited()), b;
    std::iota(a.begin(), a.end(), 0u);
    for (std::uint32_t i = 0; i < c.recruited(); ++i) b.push_back(c.pool_size - 1 - i);
    c.selection = a;
    const auto first = run_scenario(c);
    c.selection = b;
    const auto second = run_scenario(c);
    return std::pair{first, second};
  };
  const auto [s1, s2] = run_pair(ProtocolVariant::silent);
  v.check(s1.outcome == ServiceStatus::delivered_light && s2.outcome == ServiceStatus::delivered_light,
          "both silent runs deliver in lightweight mode");
  v.check(s1.recruited != s2.recruited, "selections differ");
  const bool silent_equal = s1.delivery_state_hash == s2.delivery_state_hash;
  v.check(silent_equal, "silent on-chain state independent of selection");
  const auto [w1, w2] = run_pair(ProtocolVariant::strawman);
  const bool straw_equal = w1.delivery_state_hash == w2.delivery_state_hash;
  v.check(!straw_equal, "strawman on-chain state depends on selection");
  v.detail << "silent states " << (silent_equal ? "identical" : "differ") << " (" << s1.delivery_state_hash.hex().substr(0, 16)
           << "), strawman states " << (straw_equal ? "identical" : "differ");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"availability", availability_criterion}, {"sybil-optimum", sybil_criterion},
      {"bribery-bound", bribery_criterion},     {"cost-model", cost_criterion},
      {"epoch-fairness-fuzz", fuzz_criterion},  {"crypto-oracles", crypto_criterion},
      {"relationship-secrecy", secrecy_criterion}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "threw: " << e.what();
    }
    if (!v.pass) ++failures;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
