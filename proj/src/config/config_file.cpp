#include "silentdelivery/config/config_file.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

namespace sd {

std::string to_string(AttackKind k) {
  switch (k) {
    case AttackKind::none: return "none";
    case AttackKind::bribery: return "bribery";
    case AttackKind::sybil: return "sybil";
  }
  return "?";
}

namespace {

std::string located(const std::string& source, int line, const std::string& message) {
  return line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message;
}

AttackKind parse_attack(const std::string& s) {
  if (s == "none") return AttackKind::none;
  if (s == "bribery") return AttackKind::bribery;
  if (s == "sybil") return AttackKind::sybil;
  throw std::invalid_argument("unknown attack '" + s + "' (expected none, bribery or sybil)");
}

ProtocolVariant parse_variant(const std::string& s) {
  if (s == "silent") return ProtocolVariant::silent;
  if (s == "strawman") return ProtocolVariant::strawman;
  throw std::invalid_argument("unknown variant '" + s + "' (expected silent or strawman)");
}

class Reader {
 public:
  Reader(std::string source, std::filesystem::path base_dir) : source_(std::move(source)), base_(std::move(base_dir)) {}

  RunConfig read(const YAML::Node& root) {
    RunConfig rc;
    if (!root || root.IsNull()) return rc;
    if (!root.IsMap()) fail(root, "top level must be a mapping of keys to values");
    auto& s = rc.scenario;
    auto& a = rc.adversary;
    const std::map<std::string, std::function<void(const YAML::Node&)>> keys{
        {"seed", [&](auto& v) { s.seed = as<std::uint64_t>(v); }},
        {"variant", [&](auto& v) { s.variant = convert(v, parse_variant); }},
        {"pool_size", [&](auto& v) { s.pool_size = as<std::uint32_t>(v); }},
        {"l", [&](auto& v) { s.l = as<std::uint32_t>(v); }},
        {"t", [&](auto& v) { s.t = as<std::uint32_t>(v); }},
        {"n", [&](auto& v) { s.n = as<std::uint32_t>(v); }},
        {"deposit", [&](auto& v) { s.deposit = ether(v); }},
        {"min_deposit", [&](auto& v) { s.min_deposit = ether(v); }},
        {"remuneration", [&](auto& v) { s.remuneration = ether(v); }},
        {"availability", [&](auto& v) { s.availability = as<double>(v); }},
        {"drop_probability", [&](auto& v) { s.drop_probability = as<double>(v); }},
        {"private_metadata_visible", [&](auto& v) { s.private_metadata_visible = as<bool>(v); }},
        {"slots_per_day", [&](auto& v) { s.slots_per_day = as<std::uint32_t>(v); }},
        {"epoch_duration", [&](auto& v) { s.epoch_duration = as<std::uint64_t>(v); }},
        {"lead_ticks", [&](auto& v) { s.lead_ticks = as<std::uint64_t>(v); }},
        {"mailman_funds", [&](auto& v) { s.mailman_funds = ether(v); }},
        {"sender_funds", [&](auto& v) { s.sender_funds = ether(v); }},
        {"recipient_funds", [&](auto& v) { s.recipient_funds = ether(v); }},
        {"tamper_first_delivery", [&](auto& v) { s.tamper_first_delivery = as<bool>(v); }},
        {"info", [&](auto& v) { s.info = as<std::string>(v); }},
        {"faults", [&](auto& v) { s.pool_faults = policies(v); }},
        {"recruit_faults", [&](auto& v) { s.recruit_faults = policies(v); }},
        {"selection", [&](auto& v) { s.selection = index_list(v); }},
        {"gas_schedule", [&](auto& v) {
           s.schedule = schedule(v);
           rc.explicit_schedule = true;
         }},
        {"adversary", [&](auto& v) { adversary(v, a); }},
        {"output", [&](auto& v) { output(v, rc.output); }},
    };
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      auto it = keys.find(key);
      if (it == keys.end()) fail(kv.first, "unknown key '" + key + "'");
      lines_[key] = kv.first.Mark().line + 1;
      it->second(kv.second);
    }
    try {
      rc.effective_scenario().validate();
    } catch (const ScenarioError& e) {
      auto it = lines_.find(e.field);
      throw ConfigError(source_, it == lines_.end() ? 0 : it->second,
                        e.what() + (it == lines_.end() && !e.field.empty() ? " (key '" + e.field + "' at its default)"
                                                                           : std::string()));
    }
    return rc;
  }

 private:
  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
    throw ConfigError(source_, at.Mark().line + 1, message);
  }

  template <typename T>
  T as(const YAML::Node& v) const {
    if (!v.IsScalar()) fail(v, "expected a single value");
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      fail(v, "cannot read '" + v.Scalar() + "' as the expected type");
    }
  }

  template <typename F>
  std::invoke_result_t<F, const std::string&> convert(const YAML::Node& v, F parse) const {
    try {
      return parse(as<std::string>(v));
    } catch (const std::invalid_argument& e) {
      fail(v, e.what());
    }
  }

  Amount ether(const YAML::Node& v) const {
    return convert(v, [](const std::string& s) { return parse_ether(s); });
  }

  std::map<std::uint32_t, FaultPolicy> policies(const YAML::Node& v) const {
    if (!v.IsMap()) fail(v, "expected a mapping of index to fault policy");
    std::map<std::uint32_t, FaultPolicy> out;
    for (const auto& kv : v) {
      const auto idx = as<std::uint32_t>(kv.first);
      if (out.count(idx)) fail(kv.first, "index " + std::to_string(idx) + " listed twice");
      out[idx] = convert(kv.second, [](const std::string& s) { return parse_fault_policy(s); });
    }
    return out;
  }

  std::vector<std::uint32_t> index_list(const YAML::Node& v) const {
    if (!v.IsSequence()) fail(v, "expected a list of pool indices");
    std::vector<std::uint32_t> out;
    for (const auto& e : v) out.push_back(as<std::uint32_t>(e));
    return out;
  }

  GasSchedule schedule(const YAML::Node& v) const {
    auto path = std::filesystem::path(as<std::string>(v));
    if (path.is_relative()) path = base_ / path;
    try {
      return GasSchedule::load_file(path.string());
    } catch (const std::exception& e) {
      fail(v, std::string("gas schedule: ") + e.what());
    }
  }

  void adversary(const YAML::Node& v, AdversaryConfig& a) const {
    if (!v.IsMap()) fail(v, "expected a mapping under 'adversary'");
    for (const auto& kv : v) {
      const auto key = kv.first.as<std::string>();
      const auto& val = kv.second;
      if (key == "attack")
        a.attack = convert(val, parse_attack);
      else if (key == "bribe_per_key")
        a.bribe_per_key = ether(val);
      else if (key == "side_channel")
        a.side_channel = as<bool>(val);
      else if (key == "budget")
        a.budget = ether(val);
      else if (key == "sybil_x")
        a.sybil_x = as<std::uint32_t>(val);
      else if (key == "briberable_all")
        a.briberable_all = as<bool>(val);
      else
        fail(kv.first, "unknown adversary key '" + key + "'");
    }
  }

  void output(const YAML::Node& v, OutputConfig& o) const {
    if (!v.IsMap()) fail(v, "expected a mapping under 'output'");
    for (const auto& kv : v) {
      const auto key = kv.first.as<std::string>();
      if (key == "trace")
        o.trace = as<std::string>(kv.second);
      else if (key == "summary")
        o.summary = as<std::string>(kv.second);
      else
        fail(kv.first, "unknown output key '" + key + "'");
    }
  }

  std::string source_;
  std::filesystem::path base_;
  std::map<std::string, int> lines_;
};

}  // namespace

ConfigError::ConfigError(const std::string& src, int ln, const std::string& msg)
    : std::runtime_error(located(src, ln, msg)), source(src), line(ln), message(msg) {}

ScenarioConfig RunConfig::effective_scenario() const {
  ScenarioConfig s = scenario;
  if (adversary.briberable_all)
    for (std::uint32_t i = 0; i < s.pool_size; ++i) s.pool_faults.try_emplace(i, FaultPolicy::briberable);
  return s;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json adv{{"attack", to_string(adversary.attack)},
                     {"bribe_per_key", format_ether(adversary.bribe_per_key)},
                     {"side_channel", adversary.side_channel},
                     {"sybil_x", adversary.sybil_x},
                     {"briberable_all", adversary.briberable_all}};
  if (adversary.budget) adv["budget"] = format_ether(*adversary.budget);
  nlohmann::json out = nlohmann::json::object();
  if (output.trace) out["trace"] = *output.trace;
  if (output.summary) out["summary"] = *output.summary;
  return {{"scenario", scenario.to_json()}, {"adversary", adv}, {"output", out}};
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  return Reader(source, std::filesystem::current_path()).read(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  YAML::Node root;
  try {
    root = YAML::Load(buf.str());
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path, e.mark.line + 1, e.msg);
  }
  return Reader(path, std::filesystem::path(path).parent_path()).read(root);
}

}  // namespace sd
