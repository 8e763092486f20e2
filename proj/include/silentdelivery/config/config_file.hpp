#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "silentdelivery/actors/scenario.hpp"

namespace sd {

enum class AttackKind { none, bribery, sybil };
std::string to_string(AttackKind k);

struct AdversaryConfig {
  AttackKind attack = AttackKind::none;
  Amount bribe_per_key = kUnitsPerEther;
  bool side_channel = true;
  std::optional<Amount> budget;
  /// Adversarial identities registered for the Sybil attack.
  std::uint32_t sybil_x = 0;
  /// Marks every pool mailman without an explicit fault as briberable.
  bool briberable_all = false;
};

struct OutputConfig {
  std::optional<std::string> trace;
  std::optional<std::string> summary;
};

/// One scenario file: the protocol run plus attack and output settings.
struct RunConfig {
  ScenarioConfig scenario;
  AdversaryConfig adversary;
  OutputConfig output;
  /// Whether the file named its own gas schedule.
  bool explicit_schedule = false;

  /// Scenario with adversary-derived policies applied.
  ScenarioConfig effective_scenario() const;
  nlohmann::json to_json() const;
};

/// A configuration problem, located at a line of the source when possible.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& source, int line, const std::string& message);
  std::string source;
  /// 1-based; 0 when no line applies.
  int line = 0;
  std::string message;
};

/// Parses YAML text. Keys and their meaning are listed in docs/config.md.
/// Throws ConfigError for syntax errors, unknown keys, bad values and
/// failed scenario validation.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

}  // namespace sd
