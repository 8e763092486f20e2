#include "silentdelivery/channels/message_bus.hpp"

#include <algorithm>

namespace sd {

MessageBus::MessageBus(Rng rng, BusConfig config)
    : drop_rng_(rng.fork("drop")), seal_rng_(rng.fork("seal")), config_(config) {
  if (config_.drop_probability < 0.0 || config_.drop_probability > 1.0)
    throw std::invalid_argument("drop probability must lie in [0, 1]");
}

void MessageBus::check_topic(const std::string& topic) {
  if (topic.size() != 4) throw std::invalid_argument("topics are exactly 4 bytes");
}

void MessageBus::register_key(const Address& owner, const BoxPublicKey& whisper_pub) { keys_[owner] = whisper_pub; }

void MessageBus::subscribe(const Address& owner, std::string topic) {
  check_topic(topic);
  subscribers_[std::move(topic)].insert(owner);
}

void MessageBus::send_private(const Address& from, const Address& to, std::string topic, ByteView plaintext) {
  check_topic(topic);
  auto it = keys_.find(to);
  if (it == keys_.end()) throw UnknownWhisperKeyError("no whisper key registered for " + to.hex());
  ChannelMsg m;
  m.seq = seq_++;
  m.tick = tick_;
  m.from = from;
  m.to = to;
  m.topic = std::move(topic);
  m.payload = seal(it->second, plaintext, seal_rng_);
  pending_.push_back(log_.size());
  log_.push_back(std::move(m));
}

void MessageBus::broadcast(const Address& from, std::string topic, ByteView payload) {
  check_topic(topic);
  ChannelMsg m;
  m.seq = seq_++;
  m.tick = tick_;
  m.from = from;
  m.topic = std::move(topic);
  m.payload.assign(payload.begin(), payload.end());
  pending_.push_back(log_.size());
  log_.push_back(std::move(m));
}

void MessageBus::deliver() {
  std::sort(pending_.begin(), pending_.end(), [&](std::size_t a, std::size_t b) {
    if (log_[a].from != log_[b].from) return log_[a].from < log_[b].from;
    return log_[a].seq < log_[b].seq;
  });
  for (auto i : pending_) {
    auto& m = log_[i];
    if (config_.drop_probability > 0.0 && drop_rng_.bernoulli(config_.drop_probability)) continue;
    m.delivered = true;
    if (m.to) {
      inboxes_[*m.to].push_back(m);
    } else {
      auto it = subscribers_.find(m.topic);
      if (it == subscribers_.end()) continue;
      for (const auto& sub : it->second) inboxes_[sub].push_back(m);
    }
  }
  pending_.clear();
}

std::vector<ChannelMsg> MessageBus::recv(const Address& owner) {
  auto it = inboxes_.find(owner);
  if (it == inboxes_.end()) return {};
  auto out = std::move(it->second);
  inboxes_.erase(it);
  return out;
}

std::vector<ObservedMsg> MessageBus::observe() const {
  std::vector<ObservedMsg> out;
  for (const auto& m : log_) {
    if (m.is_private()) {
      if (!config_.private_metadata_visible) continue;
      out.push_back({m.tick, m.from, m.to, m.topic, m.payload.size(), std::nullopt});
    } else {
      out.push_back({m.tick, m.from, std::nullopt, m.topic, m.payload.size(), m.payload});
    }
  }
  return out;
}

Bytes open_private(const ChannelMsg& msg, const BoxSecretKey& whisper_secret) {
  return open_sealed(whisper_secret, msg.payload);
}

nlohmann::json message_to_json(const ChannelMsg& m) {
  return {{"seq", m.seq},
          {"tick", m.tick},
          {"from", m.from.hex()},
          {"to", m.to ? nlohmann::json(m.to->hex()) : nlohmann::json(nullptr)},
          {"topic", m.topic},
          {"size", m.payload.size()},
          {"delivered", m.delivered}};
}

}  // namespace sd
