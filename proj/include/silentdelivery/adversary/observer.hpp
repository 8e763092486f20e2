#pragma once

#include <string>
#include <vector>

#include "silentdelivery/actors/scenario.hpp"

namespace sd {

/// Everything an outside observer sees of one run: on-chain state (without
/// gas-payer fields) and bus traffic under the run's visibility flags.
struct Observation {
  nlohmann::json onchain;
  std::vector<ObservedMsg> messages;
};

enum class ViewPoint {
  /// State when delivery ends, before settlement.
  delivery,
  /// State after settlement.
  settled,
};

Observation adversary_view(const ScenarioTrace& trace, ViewPoint at = ViewPoint::delivery);

/// A recruited mailman linked to the service by something the observer sees.
struct Binding {
  Address mailman;
  /// "onchain" or "broadcast:<topic>".
  std::string source;
};

/// Bindings between recruited mailmen and the service. On-chain, any
/// mention of a recruited mailman outside the registration records counts.
/// On the broadcast channel, a payload that names a recruited mailman, or
/// a message from one that names the service switch, counts.
std::vector<Binding> service_bindings(const Observation& view, const ScenarioTrace& trace);

/// Message-count and size profile with identities removed: one entry per
/// (tick, topic, kind, size) with its multiplicity.
nlohmann::json traffic_profile(const Observation& view);

}  // namespace sd
