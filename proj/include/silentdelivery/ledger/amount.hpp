#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <string>
#include <string_view>

namespace sd {

/// Currency in integer units; 1 ether = 10^10 units. At the default gas
/// price of 1.67e-8 ether per gas this makes one gas exactly 167 units.
using Amount = std::int64_t;
inline constexpr Amount kUnitsPerEther = 10'000'000'000;

using Rational = boost::rational<std::int64_t>;

/// Exact decimal parse of an ether amount ("1", "0.25", "1.67e-8").
Amount parse_ether(std::string_view text);
std::string format_ether(Amount units);

/// Exact decimal parse into a rational ("1.67e-8" -> 167/10^10).
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

/// Rounds half-up to cents and renders "$x.yz".
std::string format_usd(const Rational& usd);
std::int64_t round_cents(const Rational& usd);
double to_double(const Rational& r);

}  // namespace sd
