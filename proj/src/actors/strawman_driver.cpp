#include <set>

#include "silentdelivery/actors/driver.hpp"
#include "silentdelivery/actors/selection.hpp"
#include "silentdelivery/contracts/strawman.hpp"
#include "silentdelivery/crypto/errors.hpp"
#include "silentdelivery/crypto/hash.hpp"

namespace sd {

namespace {

struct StrawmanMailman {
  KeyPair account;
  BoxKeyPair whisper;
  FaultPolicy policy = FaultPolicy::honest;
  Rng rng{0};
  std::optional<Share> share;
};

}  // namespace

ScenarioTrace run_strawman(const ScenarioConfig& input) {
  ScenarioConfig config = input;
  config.variant = ProtocolVariant::strawman;
  config.validate();
  Rng root(config.seed);
  Ledger ledger(config.schedule, LedgerConfig{config.slots_per_day});
  MessageBus bus(root.fork("bus"), BusConfig{config.drop_probability, config.private_metadata_visible});
  std::vector<Misbehavior> misbehavior;
  std::map<Address, Amount> initial;
  auto log = [&](const Address& a, std::string kind) { misbehavior.push_back({ledger.tick(), a, std::move(kind)}); };

  // Registration.
  ledger.set_phase("register");
  const Address contract = ledger.install_genesis(
      std::make_unique<StrawmanContract>(AgentConfig{config.effective_min_deposit(), config.epoch_duration}));
  std::vector<StrawmanMailman> pool(config.pool_size);
  for (std::uint32_t i = 0; i < config.pool_size; ++i) {
    auto& m = pool[i];
    Rng r = root.fork("mailman." + std::to_string(i));
    m.account = ledger.create_eoa(r);
    m.whisper = box_keypair(r);
    m.rng = r.fork("behaviour");
    auto it = config.pool_faults.find(i);
    if (it != config.pool_faults.end()) m.policy = it->second;
    ledger.fund(m.account.address, config.mailman_funds);
    initial[m.account.address] = config.mailman_funds;
    bus.register_key(m.account.address, m.whisper.pub);
    bus.subscribe(m.account.address, topic::kLeak);
    ledger.submit_tx(m.account.address, contract, fn::kNewMailman, {{"whisper_pub", m.whisper.pub.hex()}},
                     config.deposit);
  }
  Rng sr = root.fork("sender");
  KeyPair sender = ledger.create_eoa(sr);
  ledger.fund(sender.address, config.sender_funds);
  initial[sender.address] = config.sender_funds;
  Rng rr = root.fork("recipient");
  KeyPair recipient = ledger.create_eoa(rr);
  BoxKeyPair recipient_whisper = box_keypair(rr);
  ledger.fund(recipient.address, config.recipient_funds);
  initial[recipient.address] = config.recipient_funds;
  bus.register_key(recipient.address, recipient_whisper.pub);

  // Setup: public recruitment with share commitments on chain.
  ledger.advance_to_tick(1);
  bus.set_tick(1);
  ledger.set_phase("send");
  Rng selection_rng = root.fork("selection");
  std::vector<std::uint32_t> selected =
      config.selection ? *config.selection : select_uniform(config.pool_size, config.n, selection_rng);
  for (std::uint32_t p = 1; p <= selected.size(); ++p) {
    auto rf = config.recruit_faults.find(p);
    if (rf != config.recruit_faults.end()) pool[selected[p - 1]].policy = rf->second;
  }
  Rng secrets = root.fork("sender.secrets");
  SecretKey256 key = random_secret(secrets);
  FixedBytes<32> receipt = secrets.fixed<32>();
  Bytes info(config.info.begin(), config.info.end());
  Rng share_rng = root.fork("sender.shares");
  Rng enc_rng = root.fork("sender.encrypt");
  auto shares = ss_split(key, config.t, config.n, share_rng);
  nlohmann::json list = nlohmann::json::array();
  for (std::uint32_t i = 0; i < config.n; ++i) {
    auto& m = pool[selected[i]];
    auto wire = encode_share(shares[i]);
    list.push_back({{"mailman", m.account.address.hex()}, {"share_hash", hash256(wire).hex()}});
    bus.send_private(sender.address, m.account.address, topic::kShare, wire);
  }
  auto delivery = sym_encrypt(key, delivery_plaintext(receipt, info), enc_rng);
  bus.send_private(sender.address, recipient.address, topic::kDelivery, delivery);
  const auto frame = ledger.frame_of(config.timeframe_tick());
  auto created = ledger.submit_tx(sender.address, contract, fn::kNewService,
                                  {{"timeframe", abi::encode(frame)},
                                   {"t", config.t},
                                   {"n", config.n},
                                   {"recipient", recipient.address.hex()},
                                   {"receipt_hash", hash256(receipt.view()).hex()},
                                   {"mailmen", list}},
                                  config.remuneration);
  if (!created.success) throw std::runtime_error("strawman service creation failed: " + created.error);
  bus.deliver();
  for (auto idx : selected) {
    auto& m = pool[idx];
    for (const auto& msg : bus.recv(m.account.address))
      if (msg.topic == topic::kShare) m.share = decode_share(open_private(msg, m.whisper.secret));
  }
  Bytes recipient_delivery;
  for (const auto& msg : bus.recv(recipient.address))
    if (msg.topic == topic::kDelivery) recipient_delivery = open_private(msg, recipient_whisper.secret);

  auto first_honest = [&](std::optional<Address> excluding) -> StrawmanMailman* {
    for (auto idx : selected) {
      auto& m = pool[idx];
      if ((m.policy == FaultPolicy::honest || m.policy == FaultPolicy::briberable) &&
          (!excluding || m.account.address != *excluding))
        return &m;
    }
    return nullptr;
  };

  // Epoch 0: leaked shares are reported straight away.
  ledger.advance_to_tick(2);
  bus.set_tick(2);
  ledger.set_phase("epoch-0");
  for (auto idx : selected) {
    auto& m = pool[idx];
    if (m.policy != FaultPolicy::premature || !m.share) continue;
    bus.broadcast(m.account.address, topic::kLeak, json_bytes({{"service", 0}, {"share", to_hex(encode_share(*m.share))}}));
    log(m.account.address, "premature");
  }
  bus.deliver();
  for (auto& m : pool) {
    auto inbox = bus.recv(m.account.address);
    if (&m != first_honest(std::nullopt)) continue;
    for (const auto& msg : inbox) {
      if (msg.topic != topic::kLeak || msg.from == m.account.address) continue;
      auto body = parse_json_bytes(msg.payload);
      ledger.submit_tx(m.account.address, contract, fn::kReportPremature,
                       {{"service", 0}, {"share", body.at("share").get<std::string>()}});
    }
  }

  // Time frame: shares go on chain, the recipient restores and reveals.
  const auto start = config.timeframe_tick();
  ledger.advance_to_tick(start);
  bus.set_tick(start);
  ledger.set_phase("epoch-1");
  std::vector<Share> revealed;
  for (auto idx : selected) {
    auto& m = pool[idx];
    if (!m.share) continue;
    if (m.policy == FaultPolicy::absent || m.policy == FaultPolicy::withhold_light) {
      log(m.account.address, "absent");
      continue;
    }
    if (!m.rng.bernoulli(config.availability)) {
      log(m.account.address, "unavailable");
      continue;
    }
    Share s = *m.share;
    if (m.policy == FaultPolicy::fake) {
      log(m.account.address, "fake_key");
      s.value += 1;
    }
    auto r = ledger.submit_tx(m.account.address, contract, fn::kRevealShare,
                              {{"service", 0}, {"share", to_hex(encode_share(s))}});
    if (r.success) revealed.push_back(s);
  }
  bool restored = false;
  Bytes recovered_info;
  if (revealed.size() >= config.t) {
    try {
      auto k = ss_restore(revealed, config.t);
      auto [rcpt, inf] = split_delivery(sym_decrypt(k, recipient_delivery));
      restored = true;
      recovered_info = inf;
      ledger.submit_tx(recipient.address, contract, fn::kRevealReceipt, {{"service", 0}, {"receipt", rcpt.hex()}});
    } catch (const std::exception&) {
    }
  }
  auto delivery_state = ledger.onchain_state(true);

  // Settlement.
  ledger.advance_to_tick(start + 2 * config.epoch_duration);
  ledger.set_phase("settle");
  const auto* sc = ledger.contract_as<StrawmanContract>(contract);
  std::vector<Address> accounts;
  for (const auto& m : pool) accounts.push_back(m.account.address);
  accounts.push_back(sender.address);
  accounts.push_back(recipient.address);
  for (const auto& a : accounts) {
    const auto* rec = sc->mailman(a);
    if (sc->credit(a) > 0 || (rec && rec->status == MailmanStatus::active))
      ledger.submit_tx(a, contract, fn::kWithdraw, nlohmann::json::object());
    sc = ledger.contract_as<StrawmanContract>(contract);
  }

  ScenarioTrace trace;
  const auto& svc = sc->services().at(0);
  trace.seed = config.seed;
  trace.variant = ProtocolVariant::strawman;
  trace.outcome = svc.status;
  trace.mode = ServiceMode::lightweight;
  trace.agent = contract;
  trace.sender = sender.address;
  trace.recipient = recipient.address;
  for (const auto& m : pool) {
    trace.pool.push_back(m.account.address);
    trace.policies[m.account.address] = m.policy;
  }
  for (auto idx : selected) trace.recruited.push_back(pool[idx].account.address);
  trace.receipts = ledger.receipts();
  trace.transfers = ledger.transfers();
  trace.messages = bus.log();
  trace.observed = bus.observe();
  trace.misbehavior = misbehavior;
  if (const auto* sc = ledger.contract_as<StrawmanContract>(contract); sc && !sc->services().empty())
    trace.remunerated = sc->services().front().remunerated;
  for (const auto& r : trace.receipts)
    for (const auto& e : r.events)
      if (e.name == "Slashed")
        trace.slashes.push_back({Address::parse(e.data.at("mailman").get<std::string>()), "premature",
                                 e.data.at("amount").get<Amount>(), e.data.at("amount").get<Amount>() / 2});
  trace.initial_balances = initial;
  for (const auto& [a, _] : initial) trace.final_balances[a] = ledger.balance(a);
  trace.recipient_restored = restored;
  trace.info_matches = restored && recovered_info == info;
  trace.delivery_state = delivery_state;
  trace.delivery_state_hash = hash256(as_bytes(delivery_state.dump()));
  trace.final_state = ledger.onchain_state(true);
  trace.final_state_hash = ledger.state_hash(true);
  trace.minted = ledger.minted();
  trace.gas_sink = ledger.gas_sink();
  trace.burned = ledger.burned();
  trace.conserved = ledger.conserved();
  return trace;
}

}  // namespace sd
