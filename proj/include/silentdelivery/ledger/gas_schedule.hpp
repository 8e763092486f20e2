#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "silentdelivery/ledger/amount.hpp"

namespace sd {

/// Contract function identifiers. These strings are the stable ABI used
/// in traces and as gas-schedule keys.
namespace fn {
inline constexpr std::string_view kDeploySwitch = "deploySwitch";
inline constexpr std::string_view kNewService = "newService";
inline constexpr std::string_view kDeploySupplementary = "deploySupplementary";
inline constexpr std::string_view kReportPremature = "reportPremature";
inline constexpr std::string_view kRecipientReceipt = "recipientReceipt";
inline constexpr std::string_view kRevealIdentity = "revealIdentity";
inline constexpr std::string_view kRevealPrivkey = "revealPrivkey";
inline constexpr std::string_view kReportAbsent = "reportAbsent";
inline constexpr std::string_view kReportFake = "reportFake";
inline constexpr std::string_view kInformAgent = "informAgent";
inline constexpr std::string_view kNewMailman = "newMailman";
inline constexpr std::string_view kProveAgreement = "proveAgreement";
inline constexpr std::string_view kWithdraw = "withdraw";
inline constexpr std::string_view kRevealShare = "revealShare";
inline constexpr std::string_view kRevealReceipt = "revealReceipt";

inline constexpr std::string_view kStrawmanNewMailman = "strawman.newMailman";
inline constexpr std::string_view kStrawmanNewService = "strawman.newService";
inline constexpr std::string_view kStrawmanReportPremature = "strawman.reportPremature";
inline constexpr std::string_view kStrawmanRevealShare = "strawman.revealShare";
inline constexpr std::string_view kStrawmanRevealReceipt = "strawman.revealReceipt";
inline constexpr std::string_view kStrawmanWithdraw = "strawman.withdraw";
}  // namespace fn

struct GasEntry {
  std::uint64_t base = 0;
  /// Charged once per item (agreements revealed, mailmen listed, ...).
  std::uint64_t per_item = 0;
  /// USD per call (or per item) as printed in the published cost table.
  std::optional<Rational> published_usd;
};

struct UnknownFunctionError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// Flat per-function gas prices plus the two conversion rates.
class GasSchedule {
 public:
  /// Measured costs of the reference contracts, with 1.67e-8 ether/gas
  /// and 175 USD/ether.
  static GasSchedule defaults();
  static GasSchedule from_json(const nlohmann::json& j);
  static GasSchedule load_file(const std::string& path);
  /// Defaults, overridden by the JSON file named in SD_GAS_SCHEDULE if set.
  static GasSchedule from_environment();
  nlohmann::json to_json() const;

  bool contains(std::string_view function) const;
  const GasEntry& entry(std::string_view function) const;
  void set(std::string function, GasEntry e);
  const std::map<std::string, GasEntry, std::less<>>& entries() const { return entries_; }

  std::uint64_t gas_for(std::string_view function, std::uint64_t items = 0) const;
  /// Currency units charged per unit of gas. Exact by construction.
  Amount units_per_gas() const;
  Amount fee(std::uint64_t gas) const { return static_cast<Amount>(gas) * units_per_gas(); }
  Rational usd(std::uint64_t gas) const;

  Rational gas_to_ether() const { return gas_to_ether_; }
  Rational ether_to_usd() const { return ether_to_usd_; }
  void set_rates(Rational gas_to_ether, Rational ether_to_usd);

  /// Throws std::invalid_argument unless every entry is positive and the
  /// gas price is a whole number of units.
  void validate() const;

 private:
  std::map<std::string, GasEntry, std::less<>> entries_;
  Rational gas_to_ether_{167, 10'000'000'000};
  Rational ether_to_usd_{175};
};

}  // namespace sd
