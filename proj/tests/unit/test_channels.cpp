#include <gtest/gtest.h>

#include "silentdelivery/channels/message_bus.hpp"
#include "silentdelivery/crypto/errors.hpp"
#include "silentdelivery/crypto/signature.hpp"

using namespace sd;

namespace {

struct Party {
  KeyPair account;
  BoxKeyPair whisper;
};

Party make_party(Rng& rng) { return {keypair_gen(rng), box_keypair(rng)}; }

std::string text(const Bytes& b) { return {b.begin(), b.end()}; }

}  // namespace

TEST(MessageBus, PrivateRoundTrip) {
  Rng rng(1);
  MessageBus bus(Rng(2));
  auto a = make_party(rng), b = make_party(rng), c = make_party(rng);
  bus.register_key(b.account.address, b.whisper.pub);
  bus.register_key(c.account.address, c.whisper.pub);
  bus.send_private(a.account.address, b.account.address, "PRIV", as_bytes("hi bob"));
  EXPECT_TRUE(bus.recv(b.account.address).empty()) << "nothing arrives before deliver()";
  bus.deliver();
  auto inbox = bus.recv(b.account.address);
  ASSERT_EQ(inbox.size(), 1u);
  EXPECT_TRUE(inbox[0].is_private());
  EXPECT_EQ(text(open_private(inbox[0], b.whisper.secret)), "hi bob");
  EXPECT_THROW(open_private(inbox[0], c.whisper.secret), AuthenticationError);
  EXPECT_TRUE(bus.recv(b.account.address).empty()) << "recv drains";
  EXPECT_TRUE(bus.recv(c.account.address).empty());
}

TEST(MessageBus, UnknownKeyRejected) {
  Rng rng(3);
  MessageBus bus(Rng(4));
  auto a = make_party(rng), b = make_party(rng);
  EXPECT_THROW(bus.send_private(a.account.address, b.account.address, "PRIV", as_bytes("x")), UnknownWhisperKeyError);
}

TEST(MessageBus, BroadcastReachesOnlySubscribers) {
  Rng rng(5);
  MessageBus bus(Rng(6));
  auto s = make_party(rng), m = make_party(rng), r = make_party(rng), outsider = make_party(rng);
  bus.subscribe(m.account.address, "ONIO");
  bus.subscribe(r.account.address, "ONIO");
  bus.subscribe(outsider.account.address, "OTHR");
  bus.broadcast(s.account.address, "ONIO", as_bytes("onions"));
  bus.deliver();
  for (const auto& p : {m, r}) {
    auto in = bus.recv(p.account.address);
    ASSERT_EQ(in.size(), 1u);
    EXPECT_EQ(text(in[0].payload), "onions");
    EXPECT_FALSE(in[0].is_private());
  }
  EXPECT_TRUE(bus.recv(outsider.account.address).empty());
}

TEST(MessageBus, DeliveryOrderBySenderThenSequence) {
  Rng rng(7);
  MessageBus bus(Rng(8));
  auto dst = make_party(rng);
  bus.subscribe(dst.account.address, "TOPC");
  std::vector<Party> senders;
  for (int i = 0; i < 5; ++i) senders.push_back(make_party(rng));
  for (int round = 0; round < 3; ++round)
    for (auto it = senders.rbegin(); it != senders.rend(); ++it)
      bus.broadcast(it->account.address, "TOPC", as_bytes(std::to_string(round)));
  bus.deliver();
  auto in = bus.recv(dst.account.address);
  ASSERT_EQ(in.size(), 15u);
  for (std::size_t i = 1; i < in.size(); ++i) {
    EXPECT_LE(in[i - 1].from, in[i].from);
    if (in[i - 1].from == in[i].from) {
      EXPECT_LT(in[i - 1].seq, in[i].seq);
    }
  }
}

TEST(MessageBus, DroppedMessagesNeverArrive) {
  Rng rng(9);
  MessageBus bus(Rng(10), BusConfig{0.5, true});
  auto a = make_party(rng), b = make_party(rng);
  bus.register_key(b.account.address, b.whisper.pub);
  for (int i = 0; i < 400; ++i) bus.send_private(a.account.address, b.account.address, "PRIV", as_bytes("m"));
  bus.deliver();
  auto in = bus.recv(b.account.address);
  std::size_t delivered = 0;
  for (const auto& m : bus.log()) delivered += m.delivered;
  EXPECT_EQ(in.size(), delivered);
  EXPECT_GT(delivered, 140u);
  EXPECT_LT(delivered, 260u);
}

TEST(MessageBus, ObserverSeesMetadataButNotPrivatePayloads) {
  Rng rng(11);
  for (bool visible : {true, false}) {
    MessageBus bus(Rng(12), BusConfig{0.0, visible});
    auto a = make_party(rng), b = make_party(rng);
    bus.register_key(b.account.address, b.whisper.pub);
    bus.subscribe(b.account.address, "PUBL");
    bus.send_private(a.account.address, b.account.address, "PRIV", as_bytes("secret"));
    bus.broadcast(a.account.address, "PUBL", as_bytes("public"));
    bus.deliver();
    auto seen = bus.observe();
    bool saw_private = false, saw_public = false;
    for (const auto& o : seen) {
      if (o.topic == "PRIV") {
        saw_private = true;
        EXPECT_FALSE(o.payload.has_value());
        EXPECT_EQ(o.to.has_value(), visible);
      }
      if (o.topic == "PUBL") {
        saw_public = true;
        ASSERT_TRUE(o.payload.has_value());
        EXPECT_EQ(text(*o.payload), "public");
      }
    }
    EXPECT_TRUE(saw_public);
    // With metadata hidden the private message may be omitted entirely.
    if (visible) {
      EXPECT_TRUE(saw_private);
    }
  }
}
