#include "silentdelivery/adversary/observer.hpp"

#include <map>
#include <set>
#include <tuple>

#include "silentdelivery/ledger/gas_schedule.hpp"

namespace sd {

Observation adversary_view(const ScenarioTrace& trace, ViewPoint at) {
  return {at == ViewPoint::delivery ? trace.delivery_state : trace.final_state, trace.observed};
}

namespace {

// Registration records name every pool member and so say nothing about
// who serves whom; everything else is searched.
nlohmann::json strip_registrations(nlohmann::json state) {
  if (state.contains("contracts")) {
    for (auto& [_, c] : state["contracts"].items()) {
      if (c.value("kind", "") == "agent" && c.contains("storage")) c["storage"].erase("mailmen");
    }
  }
  if (state.contains("calls")) {
    auto kept = nlohmann::json::array();
    for (auto& call : state["calls"]) {
      const auto f = call.value("function", "");
      if (f != fn::kNewMailman && f != fn::kStrawmanNewMailman) kept.push_back(call);
    }
    state["calls"] = kept;
  }
  return state;
}

bool mentions(const std::string& text, const Address& a) { return text.find(a.hex()) != std::string::npos; }

}  // namespace

std::vector<Binding> service_bindings(const Observation& view, const ScenarioTrace& trace) {
  std::vector<Binding> out;
  const std::string onchain = strip_registrations(view.onchain).dump();
  for (const auto& mm : trace.recruited)
    if (mentions(onchain, mm)) out.push_back({mm, "onchain"});

  const std::set<Address> recruited(trace.recruited.begin(), trace.recruited.end());
  std::set<std::pair<Address, std::string>> seen;
  for (const auto& msg : view.messages) {
    if (!msg.payload) continue;
    const std::string text(msg.payload->begin(), msg.payload->end());
    const std::string source = "broadcast:" + msg.topic;
    for (const auto& mm : trace.recruited) {
      bool bound = mentions(text, mm) || (msg.from == mm && mentions(text, trace.switch_addr));
      if (bound && seen.insert({mm, source}).second) out.push_back({mm, source});
    }
  }
  return out;
}

nlohmann::json traffic_profile(const Observation& view) {
  std::map<std::tuple<std::uint64_t, std::string, std::string, std::size_t>, std::uint64_t> counts;
  for (const auto& msg : view.messages)
    ++counts[{msg.tick, msg.topic, msg.payload ? "broadcast" : "private", msg.size}];
  auto out = nlohmann::json::array();
  for (const auto& [k, c] : counts)
    out.push_back({{"tick", std::get<0>(k)},
                   {"topic", std::get<1>(k)},
                   {"kind", std::get<2>(k)},
                   {"size", std::get<3>(k)},
                   {"count", c}});
  return out;
}

}  // namespace sd
