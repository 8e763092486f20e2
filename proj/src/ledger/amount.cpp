#include "silentdelivery/ledger/amount.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace sd {

Rational parse_rational(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("not a decimal number: " + std::string(text)); };
  if (text.empty()) throw fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_rational(text.substr(0, slash));
    auto den = parse_rational(text.substr(slash + 1));
    if (den.numerator() == 0) throw fail();
    return num / den;
  }
  bool negative = false;
  std::size_t pos = 0;
  if (text[pos] == '-' || text[pos] == '+') negative = text[pos++] == '-';

  std::int64_t mantissa = 0;
  int scale = 0;
  bool seen_digit = false, seen_point = false;
  for (; pos < text.size() && text[pos] != 'e' && text[pos] != 'E'; ++pos) {
    char c = text[pos];
    if (c == '.') {
      if (seen_point) throw fail();
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) throw fail();
    seen_digit = true;
    if (mantissa > (INT64_MAX - 9) / 10) throw std::out_of_range("decimal literal too long");
    mantissa = mantissa * 10 + (c - '0');
    if (seen_point) --scale;
  }
  if (!seen_digit) throw fail();
  if (pos < text.size()) {
    std::string exp(text.substr(pos + 1));
    char* end = nullptr;
    long e = std::strtol(exp.c_str(), &end, 10);
    if (exp.empty() || *end != '\0') throw fail();
    scale += static_cast<int>(e);
  }
  Rational r(negative ? -mantissa : mantissa);
  std::int64_t p = 1;
  for (int i = 0; i < std::abs(scale); ++i) {
    if (p > INT64_MAX / 10) throw std::out_of_range("exponent out of range");
    p *= 10;
  }
  return scale >= 0 ? r * p : r / p;
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Amount parse_ether(std::string_view text) {
  Rational units = parse_rational(text) * kUnitsPerEther;
  if (units.denominator() != 1) throw std::invalid_argument("amount finer than one unit: " + std::string(text));
  if (units.numerator() < 0) throw std::invalid_argument("negative amount: " + std::string(text));
  return units.numerator();
}

std::string format_ether(Amount units) {
  std::string sign = units < 0 ? "-" : "";
  if (units < 0) units = -units;
  std::string frac = std::to_string(units % kUnitsPerEther);
  frac.insert(0, 10 - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string whole = sign + std::to_string(units / kUnitsPerEther);
  return frac.empty() ? whole : whole + "." + frac;
}

std::int64_t round_cents(const Rational& usd) {
  Rational scaled = usd * 100 + Rational(1, 2);
  std::int64_t q = scaled.numerator() / scaled.denominator();
  if (scaled.numerator() < 0 && scaled.numerator() % scaled.denominator() != 0) --q;
  return q;
}

std::string format_usd(const Rational& usd) {
  std::int64_t cents = round_cents(usd);
  std::string sign = cents < 0 ? "-" : "";
  if (cents < 0) cents = -cents;
  std::string c = std::to_string(cents % 100);
  if (c.size() < 2) c.insert(0, "0");
  return sign + "$" + std::to_string(cents / 100) + "." + c;
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace sd
