#include "silentdelivery/analysis/sybil.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

namespace sd {

namespace {

void check_counts(std::uint32_t l, long double v, long double d) {
  if (l == 0) throw std::invalid_argument("l must be at least 1");
  if (!(v >= 0) || !(d > 0)) throw std::invalid_argument("need v >= 0 and d > 0");
}

}  // namespace

long double sybil_expected_deposit(std::uint32_t l, long double v, long double d, std::uint32_t t, std::uint32_t n,
                                   long double p_m) {
  check_counts(l, v, d);
  if (t == 0 || t > n) throw std::invalid_argument("need 1 <= t <= n");
  if (!(p_m > 0 && p_m < 1)) throw std::invalid_argument("p_M must lie in (0, 1)");
  return v * d * t / n * std::pow(p_m, 1.0L - l) / (1.0L - p_m);
}

Rational optimal_sybil_fraction(std::uint32_t l) {
  if (l == 0) throw std::invalid_argument("l must be at least 1");
  // d/dp of log d_hat is (1-l)/p + 1/(1-p); it vanishes at p = (l-1)/l.
  // For l = 1 the derivative is positive on (0, 1), so there is no
  // interior minimum.
  if (l == 1) throw DegenerateCaseError("with l = 1 the Sybil cost decreases towards p_M = 0; no interior optimum");
  return Rational(l - 1, l);
}

long double optimal_sybil_count(std::uint32_t l, long double v) {
  auto p = optimal_sybil_fraction(l);
  // x = v·p/(1-p) = v·((l-1)/l)/(1/l) = (l-1)·v.
  return v * p.numerator() / (p.denominator() - p.numerator());
}

long double sybil_min_deposit(std::uint32_t l, long double v, long double d) {
  check_counts(l, v, d);
  return optimal_sybil_count(l, v) * d;
}

SybilNumericOptimum minimize_sybil_numeric(std::uint32_t l, long double v, long double d, std::uint32_t t,
                                           std::uint32_t n) {
  check_counts(l, v, d);
  if (t == 0 || t > n) throw std::invalid_argument("need 1 <= t <= n");
  using Float = boost::multiprecision::cpp_bin_float_50;
  const Float scale = Float(v) * Float(d) * t / n;
  auto f = [&](const Float& p) { return scale * pow(p, Float(1) - l) / (Float(1) - p); };
  const int bits = std::numeric_limits<Float>::digits / 2;
  auto [arg, val] = boost::math::tools::brent_find_minima(f, Float("1e-12"), Float(1) - Float("1e-12"), bits);
  SybilNumericOptimum out;
  out.argmin = static_cast<long double>(arg);
  out.min_expected_deposit = static_cast<long double>(val);
  out.deposit_at_argmin = static_cast<long double>(Float(v) * arg / (Float(1) - arg) * Float(d));
  return out;
}

long double bribery_cost(std::uint32_t t, std::uint32_t l, long double d) {
  if (t == 0 || l == 0 || !(d > 0)) throw std::invalid_argument("bribery cost needs positive t, l and d");
  return static_cast<long double>(t) * l * d;
}

}  // namespace sd
