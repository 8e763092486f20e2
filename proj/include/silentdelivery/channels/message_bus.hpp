#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "silentdelivery/crypto/box.hpp"
#include "silentdelivery/crypto/rng.hpp"

namespace sd {

struct UnknownWhisperKeyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One off-chain message. `to` is empty for topic broadcasts. Private
/// payloads are sealed to the addressee's whisper key.
struct ChannelMsg {
  std::uint64_t seq = 0;
  std::uint64_t tick = 0;
  Address from;
  std::optional<Address> to;
  std::string topic;
  Bytes payload;
  bool delivered = false;

  bool is_private() const { return to.has_value(); }
};

/// What an outside observer learns about one message.
struct ObservedMsg {
  std::uint64_t tick = 0;
  Address from;
  std::optional<Address> to;
  std::string topic;
  std::size_t size = 0;
  /// Broadcast payloads only.
  std::optional<Bytes> payload;
};

struct BusConfig {
  double drop_probability = 0.0;
  /// Whether observers see sender, addressee and size of private messages.
  bool private_metadata_visible = true;
};

/// In-process model of topic broadcast plus private channels. Messages
/// queue until deliver(), which hands them out sorted by sender address
/// then sequence number and applies the configured random loss. Nothing
/// here touches the ledger, so off-chain traffic costs no gas.
class MessageBus {
 public:
  MessageBus(Rng rng, BusConfig config = {});

  void register_key(const Address& owner, const BoxPublicKey& whisper_pub);
  bool has_key(const Address& owner) const { return keys_.count(owner) != 0; }
  void subscribe(const Address& owner, std::string topic);

  /// Throws UnknownWhisperKeyError when `to` has no registered key.
  void send_private(const Address& from, const Address& to, std::string topic, ByteView plaintext);
  void broadcast(const Address& from, std::string topic, ByteView payload);

  void set_tick(std::uint64_t tick) { tick_ = tick; }
  /// Moves queued messages into inboxes.
  void deliver();
  /// Drains `owner`'s inbox.
  std::vector<ChannelMsg> recv(const Address& owner);

  /// Every message ever sent, delivered or not.
  const std::vector<ChannelMsg>& log() const { return log_; }
  std::vector<ObservedMsg> observe() const;
  const BusConfig& config() const { return config_; }

 private:
  static void check_topic(const std::string& topic);

  Rng drop_rng_;
  Rng seal_rng_;
  BusConfig config_;
  std::uint64_t tick_ = 0;
  std::uint64_t seq_ = 0;
  std::map<Address, BoxPublicKey> keys_;
  std::map<std::string, std::set<Address>> subscribers_;
  std::vector<std::size_t> pending_;
  std::map<Address, std::vector<ChannelMsg>> inboxes_;
  std::vector<ChannelMsg> log_;
};

/// Opens a private message with the addressee's whisper secret.
Bytes open_private(const ChannelMsg& msg, const BoxSecretKey& whisper_secret);

nlohmann::json message_to_json(const ChannelMsg& m);

}  // namespace sd
