#include "silentdelivery/adversary/attacks.hpp"

#include <cmath>

#include "silentdelivery/actors/driver.hpp"
#include "silentdelivery/actors/selection.hpp"
#include "silentdelivery/crypto/shamir.hpp"

namespace sd {

Rational AttackParams::p_m() const {
  if (x + v == 0) throw std::invalid_argument("empty mailman pool");
  return Rational(x, static_cast<std::int64_t>(x) + v);
}

namespace {

// Shares the adversary can read with `keys`, and whether they restore the
// sender's key.
void assess(const Simulation& sim, const std::vector<BoxSecretKey>& keys, AttackOutcome& out) {
  PeelCache cache;
  auto onions = decode_onion_set(sim.sender().onion_wire);
  auto shares = peel_all(onions, keys, cache);
  out.shares_obtained = static_cast<std::uint32_t>(shares.size());
  const auto t = sim.config().t;
  out.key_recovered = false;
  if (shares.size() >= t) {
    try {
      out.key_recovered = ss_restore(shares, t) == sim.sender().key;
    } catch (const std::exception&) {
    }
  }
}

}  // namespace

AttackOutcome run_bribery(const ScenarioConfig& scenario, const BriberyOptions& options) {
  if (options.bribe_per_key < 0) throw std::invalid_argument("bribe must be non-negative");
  if (scenario.variant != ProtocolVariant::silent) throw std::invalid_argument("bribery runs against the silent variant");
  Simulation sim(scenario);
  sim.setup();
  auto& ledger = sim.ledger();
  Rng rng = Rng(scenario.seed).fork("adversary");
  const KeyPair adversary = ledger.create_eoa(rng);
  const Amount budget = options.budget.value_or(options.bribe_per_key * scenario.pool_size);
  ledger.fund(adversary.address, budget);

  AttackOutcome out;
  std::vector<BoxSecretKey> keys;
  const auto& sw = sim.sender().switch_addr;

  // Returns whether the mailman sold its key.
  auto offer = [&](MailmanActor& mm) {
    if (mm.bribed) return true;
    ++out.offers;
    if (ledger.balance(adversary.address) < options.bribe_per_key) return false;
    const auto* rec = sim.agent_contract().mailman(mm.account.address);
    const Amount at_stake = rec ? rec->deposit : 0;
    if (mm.policy != FaultPolicy::briberable || options.bribe_per_key <= at_stake) return false;
    ledger.escrow_transfer(adversary.address, mm.account.address, options.bribe_per_key, "bribe");
    mm.bribed = true;
    keys.push_back(mm.frame_key.secret);
    ++out.keys_bought;
    out.total_spent += options.bribe_per_key;
    // The escrow releases the bribe against the key, which makes the key
    // public. The seller knows its own index and supplies it.
    if (mm.position) {
      nlohmann::json leak{{"switch", sw.hex()}, {"index", *mm.position}, {"privkey", mm.frame_key.secret.hex()}};
      sim.bus().broadcast(adversary.address, topic::kLeak, json_bytes(leak));
      sim.log_misbehavior(mm.account.address, "premature");
    }
    return true;
  };

  const auto& cfg = sim.config();
  if (options.side_channel) {
    std::uint32_t complete = 0;
    for (std::uint32_t s = 1; s <= cfg.n && complete < cfg.t; ++s) {
      bool all = true;
      for (auto p : layer_positions(s, cfg.l)) {
        if (!offer(sim.recruit(p))) {
          all = false;
          break;
        }
      }
      if (all) ++complete;
    }
    assess(sim, keys, out);
  } else {
    Rng order_rng = rng.fork("targets");
    for (auto idx : select_uniform(cfg.pool_size, cfg.pool_size, order_rng)) {
      if (!offer(sim.pool().at(idx))) continue;
      assess(sim, keys, out);
      if (out.shares_obtained >= cfg.t) break;
    }
    assess(sim, keys, out);
  }

  out.trace = sim.run_delivery();
  for (const auto& s : out.trace.slashes) {
    for (const auto& mm : sim.pool())
      if (mm.bribed && mm.account.address == s.mailman) out.deposits_forfeited += s.amount;
  }
  return out;
}

AttackOutcome run_sybil(const ScenarioConfig& scenario, std::uint32_t x) {
  ScenarioConfig cfg = scenario;
  const std::uint32_t v = scenario.pool_size;
  cfg.pool_size = v + x;
  cfg.validate();
  Simulation sim(cfg);
  sim.setup();

  AttackOutcome out;
  std::vector<BoxSecretKey> keys;
  for (std::uint32_t i = v; i < v + x; ++i) keys.push_back(sim.pool()[i].frame_key.secret);
  out.total_spent = static_cast<Amount>(x) * cfg.deposit;
  assess(sim, keys, out);
  out.trace.seed = cfg.seed;
  out.trace.pool.reserve(sim.pool().size());
  for (const auto& mm : sim.pool()) out.trace.pool.push_back(mm.account.address);
  for (std::uint32_t p = 1; p <= cfg.recruited(); ++p) out.trace.recruited.push_back(sim.recruit(p).account.address);
  return out;
}

SybilEstimate sybil_monte_carlo(std::uint32_t l, std::uint32_t t, std::uint32_t n, std::uint32_t v, std::uint32_t x,
                                double d, std::uint32_t trials, std::uint64_t seed) {
  if (l == 0 || t == 0 || t > n) throw std::invalid_argument("invalid (l, t, n)");
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const std::uint32_t m = l * n;
  if (v + x < m) throw std::invalid_argument("pool smaller than the recruited set");

  Rng rng(seed);
  SybilEstimate est;
  est.trials = trials;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t successes = 0;
  for (std::uint32_t k = 0; k < trials; ++k) {
    // Pool indices >= v are adversarial.
    auto chosen = select_uniform(v + x, m, rng);
    std::uint32_t captured = 0;
    for (std::uint32_t s = 1; s <= n; ++s) {
      bool all = true;
      for (auto p : layer_positions(s, l)) all = all && chosen[p - 1] >= v;
      captured += all ? 1 : 0;
    }
    sum += captured;
    sum_sq += static_cast<double>(captured) * captured;
    successes += captured >= t ? 1 : 0;
  }
  est.mean_captured = sum / trials;
  est.var_captured = trials > 1 ? (sum_sq - sum * sum / trials) / (trials - 1) : 0.0;
  est.success_rate = static_cast<double>(successes) / trials;
  est.share_capture_rate = est.mean_captured / n;
  est.expected_deposit = est.mean_captured > 0 ? x * d * t / est.mean_captured : INFINITY;
  return est;
}

void inject_fault(ScenarioConfig& scenario, std::uint32_t position, FaultPolicy kind) {
  if (kind != FaultPolicy::premature && kind != FaultPolicy::absent && kind != FaultPolicy::fake)
    throw std::invalid_argument("only premature, absent and fake faults can be injected");
  if (position == 0 || position > scenario.recruited())
    throw UnknownMailmanError("no recruited mailman at position " + std::to_string(position));
  scenario.recruit_faults[position] = kind;
}

}  // namespace sd
