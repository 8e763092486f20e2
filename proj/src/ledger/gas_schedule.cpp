#include "silentdelivery/ledger/gas_schedule.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace sd {

namespace {
GasEntry flat(std::uint64_t gas, Rational usd) { return {gas, 0, usd}; }
}  // namespace

GasSchedule GasSchedule::defaults() {
  GasSchedule s;
  // Reference measurements (gas, published USD).
  s.set(std::string(fn::kDeploySwitch), flat(616666, Rational(181, 100)));
  s.set(std::string(fn::kNewService), flat(83121, Rational(24, 100)));
  s.set(std::string(fn::kDeploySupplementary), flat(2425356, Rational(710, 100)));
  s.set(std::string(fn::kReportPremature), flat(65317, Rational(19, 100)));
  s.set(std::string(fn::kRecipientReceipt), flat(54291, Rational(16, 100)));
  s.set(std::string(fn::kRevealIdentity), {0, 72678, Rational(21, 100)});
  s.set(std::string(fn::kRevealPrivkey), flat(90689, Rational(27, 100)));
  s.set(std::string(fn::kReportAbsent), flat(65343, Rational(19, 100)));
  s.set(std::string(fn::kReportFake), flat(1280723, Rational(375, 100)));
  s.set(std::string(fn::kInformAgent), flat(57042, Rational(17, 100)));

  // Not measured; estimates so that every call is metered.
  s.set(std::string(fn::kNewMailman), {150000, 0, std::nullopt});
  s.set(std::string(fn::kProveAgreement), {45000, 0, std::nullopt});
  s.set(std::string(fn::kWithdraw), {30000, 0, std::nullopt});

  // Strawman comparison contract: one storage slot pair per listed mailman.
  s.set(std::string(fn::kStrawmanNewMailman), {150000, 0, std::nullopt});
  s.set(std::string(fn::kStrawmanNewService), {83121, 44000, std::nullopt});
  s.set(std::string(fn::kStrawmanReportPremature), {65317, 0, std::nullopt});
  s.set(std::string(fn::kStrawmanRevealShare), {60000, 0, std::nullopt});
  s.set(std::string(fn::kStrawmanRevealReceipt), {54291, 0, std::nullopt});
  s.set(std::string(fn::kStrawmanWithdraw), {30000, 0, std::nullopt});
  return s;
}

bool GasSchedule::contains(std::string_view function) const { return entries_.find(function) != entries_.end(); }

const GasEntry& GasSchedule::entry(std::string_view function) const {
  auto it = entries_.find(function);
  if (it == entries_.end()) throw UnknownFunctionError("no gas entry for function " + std::string(function));
  return it->second;
}

void GasSchedule::set(std::string function, GasEntry e) { entries_[std::move(function)] = e; }

std::uint64_t GasSchedule::gas_for(std::string_view function, std::uint64_t items) const {
  const auto& e = entry(function);
  return e.base + e.per_item * items;
}

Amount GasSchedule::units_per_gas() const {
  Rational units = gas_to_ether_ * kUnitsPerEther;
  if (units.denominator() != 1) throw std::invalid_argument("gas price is not a whole number of units");
  return units.numerator();
}

Rational GasSchedule::usd(std::uint64_t gas) const {
  return Rational(static_cast<std::int64_t>(gas)) * gas_to_ether_ * ether_to_usd_;
}

void GasSchedule::set_rates(Rational gas_to_ether, Rational ether_to_usd) {
  gas_to_ether_ = gas_to_ether;
  ether_to_usd_ = ether_to_usd;
}

void GasSchedule::validate() const {
  for (const auto& [name, e] : entries_)
    if (e.base + e.per_item == 0) throw std::invalid_argument("gas entry must be positive: " + name);
  if (gas_to_ether_.numerator() <= 0 || ether_to_usd_.numerator() <= 0) throw std::invalid_argument("conversion rates must be positive");
  (void)units_per_gas();
}

nlohmann::json GasSchedule::to_json() const {
  nlohmann::json j;
  j["gas_to_ether"] = format_rational(gas_to_ether_);
  j["ether_to_usd"] = format_rational(ether_to_usd_);
  auto& fns = j["functions"] = nlohmann::json::object();
  for (const auto& [name, e] : entries_) {
    nlohmann::json row{{"base", e.base}, {"per_item", e.per_item}};
    if (e.published_usd) row["published_usd"] = format_rational(*e.published_usd);
    fns[name] = row;
  }
  return j;
}

GasSchedule GasSchedule::from_json(const nlohmann::json& j) {
  GasSchedule s = defaults();
  auto rate = [](const nlohmann::json& v) {
    return v.is_string() ? parse_rational(v.get<std::string>()) : parse_rational(v.dump());
  };
  Rational g2e = s.gas_to_ether_, e2u = s.ether_to_usd_;
  if (j.contains("gas_to_ether")) g2e = rate(j.at("gas_to_ether"));
  if (j.contains("ether_to_usd")) e2u = rate(j.at("ether_to_usd"));
  s.set_rates(g2e, e2u);
  if (j.contains("functions")) {
    for (const auto& [name, row] : j.at("functions").items()) {
      GasEntry e;
      if (row.is_number_unsigned()) {
        e.base = row.get<std::uint64_t>();
      } else {
        e.base = row.value("base", std::uint64_t{0});
        e.per_item = row.value("per_item", std::uint64_t{0});
        if (row.contains("published_usd")) e.published_usd = rate(row.at("published_usd"));
      }
      s.set(name, e);
    }
  }
  s.validate();
  return s;
}

GasSchedule GasSchedule::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gas schedule file " + path);
  return from_json(nlohmann::json::parse(in));
}

GasSchedule GasSchedule::from_environment() {
  if (const char* path = std::getenv("SD_GAS_SCHEDULE"); path && *path) return load_file(path);
  return defaults();
}

}  // namespace sd
