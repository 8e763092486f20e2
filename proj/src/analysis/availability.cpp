#include "silentdelivery/analysis/availability.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <stdexcept>

#include "silentdelivery/crypto/rng.hpp"

namespace sd {

void AvailabilityParams::validate() const {
  if (l == 0) throw std::invalid_argument("l must be at least 1");
  if (t == 0 || t > n) throw std::invalid_argument("need 1 <= t <= n");
  if (!(a_t >= 0.0 && a_t <= 1.0)) throw std::invalid_argument("A_T must lie in [0, 1]");
}

long double AvailabilityParams::share_loss() const {
  return 1.0L - std::pow(static_cast<long double>(a_t), static_cast<long double>(l));
}

long double availability(std::uint32_t l, std::uint32_t t, std::uint32_t n, double a_t) {
  AvailabilityParams p{l, t, n, a_t};
  p.validate();
  const long double loss = p.share_loss();
  if (loss <= 0.0L) return 1.0L;
  if (loss >= 1.0L) return 0.0L;
  // Service survives iff at most n - t shares are lost.
  boost::math::binomial_distribution<long double> lost(n, loss);
  return boost::math::cdf(lost, static_cast<long double>(n - t));
}

double MonteCarloEstimate::sigma_at(double p) const {
  return trials ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
}

MonteCarloEstimate availability_mc(std::uint32_t l, std::uint32_t t, std::uint32_t n, double a_t,
                                   std::uint64_t trials, std::uint64_t seed) {
  AvailabilityParams{l, t, n, a_t}.validate();
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  Rng rng(seed);
  MonteCarloEstimate est;
  est.trials = trials;
  for (std::uint64_t k = 0; k < trials; ++k) {
    std::uint32_t alive = 0;
    for (std::uint32_t s = 0; s < n; ++s) {
      bool whole = true;
      // Every holder is sampled so the stream consumption is fixed per trial.
      for (std::uint32_t j = 0; j < l; ++j) whole = rng.bernoulli(a_t) && whole;
      alive += whole ? 1 : 0;
    }
    est.successes += alive >= t ? 1 : 0;
  }
  est.estimate = static_cast<double>(est.successes) / static_cast<double>(trials);
  return est;
}

}  // namespace sd
