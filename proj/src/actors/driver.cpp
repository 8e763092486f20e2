#include "silentdelivery/actors/driver.hpp"

#include <algorithm>

#include "silentdelivery/actors/selection.hpp"
#include "silentdelivery/contracts/supplementary.hpp"
#include "silentdelivery/contracts/switch.hpp"
#include "silentdelivery/crypto/errors.hpp"
#include "silentdelivery/crypto/hash.hpp"

namespace sd {

namespace {
constexpr int kMaxRounds = 8;

std::string phase_of(std::uint32_t epoch) { return "epoch-" + std::to_string(epoch); }
}  // namespace

bool verify_invitation(const Ledger& ledger, const Address& agent, const Address& sender, const Address& mailman,
                       const nlohmann::json& invite) {
  try {
    auto sw = abi::address_arg(invite, "switch");
    auto index = abi::u32_arg(invite, "index");
    auto code = abi::bytes_arg(invite, "sup_code");
    auto vrs_sup = abi::signature_arg(invite, "vrs_sup");
    const auto* sw_contract = ledger.contract_as<SwitchContract>(sw);
    const auto* agent_contract = ledger.contract_as<AgentContract>(agent);
    if (!sw_contract || !agent_contract) return false;
    if (sw_contract->sender() != sender || sw_contract->agent() != agent) return false;
    const auto* s = agent_contract->service(sw);
    if (!s || s->sender != sender || s->epoch != 0) return false;
    if (index < 1 || index > s->spec.recruited()) return false;
    if (code != abi::supplementary_code(agent)) return false;
    if (recover_signer(abi::supplementary_digest(sw, code), vrs_sup) != sender) return false;
    const auto* rec = agent_contract->mailman(mailman);
    return rec && rec->timeframe_pubkeys.count(s->spec.timeframe) != 0;
  } catch (const std::exception&) {
    return false;
  }
}

Simulation::Simulation(ScenarioConfig config) : config_(std::move(config)), root_(config_.seed) {
  config_.validate();
  if (config_.variant != ProtocolVariant::silent) throw ScenarioError("Simulation runs the silent variant only");
  ledger_ = std::make_unique<Ledger>(config_.schedule, LedgerConfig{config_.slots_per_day});
  bus_ = std::make_unique<MessageBus>(root_.fork("bus"),
                                      BusConfig{config_.drop_probability, config_.private_metadata_visible});
  selection_rng_ = root_.fork("selection");
}

const AgentContract& Simulation::agent_contract() const { return *ledger_->contract_as<AgentContract>(agent_); }

const ServiceRecord& Simulation::service() const {
  const auto* s = agent_contract().service(sender_.switch_addr);
  if (!s) throw std::logic_error("service not created");
  return *s;
}

void Simulation::log_misbehavior(const Address& mailman, std::string kind) {
  misbehavior_.push_back({ledger_->tick(), mailman, std::move(kind)});
}

TxReceipt Simulation::call(const Address& caller, const Address& target, std::string_view function,
                           nlohmann::json args, Amount value) {
  return ledger_->submit_tx(caller, target, function, std::move(args), value);
}

bool Simulation::present(MailmanActor& m) { return m.rng.bernoulli(config_.availability); }

MailmanActor* Simulation::first_dutiful(std::optional<Address> excluding) {
  for (std::uint32_t p = 1; p <= sender_.selected.size(); ++p) {
    auto& m = recruit(p);
    if (m.dutiful() && (!excluding || m.account.address != *excluding)) return &m;
  }
  return nullptr;
}

std::vector<std::uint32_t> Simulation::draw_selection(std::uint32_t count, const std::set<std::uint32_t>& exclude) {
  if (exclude.empty()) return select_uniform(config_.pool_size, count, selection_rng_);
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t i = 0; i < config_.pool_size; ++i)
    if (!exclude.count(i)) candidates.push_back(i);
  if (candidates.size() < count) throw ScenarioError("mailman pool exhausted during recruitment");
  auto picks = select_uniform(static_cast<std::uint32_t>(candidates.size()), count, selection_rng_);
  for (auto& p : picks) p = candidates[p];
  return picks;
}

void Simulation::setup() {
  if (set_up_) return;
  set_up_ = true;
  register_pool();
  setup_service();
  recruit_mailmen();
  distribute_shares();
}

void Simulation::register_pool() {
  ledger_->set_phase("register");
  agent_ = ledger_->install_genesis(
      std::make_unique<AgentContract>(AgentConfig{config_.effective_min_deposit(), config_.epoch_duration}));
  const auto frame = ledger_->frame_of(config_.timeframe_tick());

  pool_.resize(config_.pool_size);
  for (std::uint32_t i = 0; i < config_.pool_size; ++i) {
    auto& m = pool_[i];
    Rng r = root_.fork("mailman." + std::to_string(i));
    m.pool_index = i;
    m.account = ledger_->create_eoa(r);
    m.whisper = box_keypair(r);
    m.frame_key = box_keypair(r);
    m.rng = r.fork("behaviour");
    auto it = config_.pool_faults.find(i);
    m.policy = it == config_.pool_faults.end() ? FaultPolicy::honest : it->second;
    ledger_->fund(m.account.address, config_.mailman_funds);
    initial_[m.account.address] = config_.mailman_funds;
    bus_->register_key(m.account.address, m.whisper.pub);
    for (const char* t : {topic::kOnions, topic::kPublicKey, topic::kLeak}) bus_->subscribe(m.account.address, t);

    auto entry = abi::encode(frame);
    entry["pubkey"] = m.frame_key.pub.hex();
    auto r2 = call(m.account.address, agent_, fn::kNewMailman,
                   {{"whisper_pub", m.whisper.pub.hex()}, {"timeframes", nlohmann::json::array({entry})}},
                   config_.deposit);
    if (!r2.success) throw std::runtime_error("mailman registration failed: " + r2.error);
  }

  Rng sr = root_.fork("sender");
  sender_.account = ledger_->create_eoa(sr);
  sender_.whisper = box_keypair(sr);
  ledger_->fund(sender_.account.address, config_.sender_funds);
  initial_[sender_.account.address] = config_.sender_funds;
  bus_->register_key(sender_.account.address, sender_.whisper.pub);

  Rng rr = root_.fork("recipient");
  recipient_.account = ledger_->create_eoa(rr);
  recipient_.whisper = box_keypair(rr);
  ledger_->fund(recipient_.account.address, config_.recipient_funds);
  initial_[recipient_.account.address] = config_.recipient_funds;
  bus_->register_key(recipient_.account.address, recipient_.whisper.pub);
  for (const char* t : {topic::kOnions, topic::kPublicKey}) bus_->subscribe(recipient_.account.address, t);
}

void Simulation::setup_service() {
  ledger_->advance_to_tick(1);
  bus_->set_tick(1);
  ledger_->set_phase("send");
  const auto& s = sender_.account;

  auto deployed = ledger_->deploy_contract(s.address, std::make_unique<SwitchContract>(agent_, s.address),
                                           fn::kDeploySwitch);
  if (!deployed.success || !deployed.created) throw std::runtime_error("switch deployment failed");
  sender_.switch_addr = *deployed.created;
  sender_.sup_addr = SwitchContract::predict_supplementary(sender_.switch_addr);

  Rng secrets = root_.fork("sender.secrets");
  sender_.key = random_secret(secrets);
  sender_.receipt = secrets.fixed<32>();
  sender_.info.assign(config_.info.begin(), config_.info.end());
  sender_.sup_code = abi::supplementary_code(agent_);
  sender_.vrs_sup = sign(s, abi::supplementary_digest(sender_.switch_addr, sender_.sup_code));

  nlohmann::json args{{"timeframe", abi::encode(ledger_->frame_of(config_.timeframe_tick()))},
                      {"l", config_.l},
                      {"t", config_.t},
                      {"n", config_.n},
                      {"switch", sender_.switch_addr.hex()},
                      {"sup", sender_.sup_addr.hex()},
                      {"recipient", recipient_.account.address.hex()},
                      {"receipt_hash", hash256(sender_.receipt.view()).hex()}};
  auto r = call(s.address, agent_, fn::kNewService, std::move(args), config_.remuneration);
  if (!r.success) throw std::runtime_error("service creation failed: " + r.error);
}

void Simulation::recruit_mailmen() {
  const std::uint32_t m = config_.recruited();
  sender_.selected = config_.selection ? *config_.selection : draw_selection(m, {});
  sender_.agreements.assign(m, Agreement{});
  std::set<std::uint32_t> invited(sender_.selected.begin(), sender_.selected.end());
  std::vector<bool> done(m, false);
  std::vector<int> silent_rounds(m, 0);
  const auto& sw = sender_.switch_addr;
  const Address sender_addr = sender_.account.address;

  for (int round = 0; round < kMaxRounds * 4; ++round) {
    std::vector<std::uint32_t> pending;
    for (std::uint32_t p = 1; p <= m; ++p)
      if (!done[p - 1]) pending.push_back(p);
    if (pending.empty()) break;

    for (auto p : pending) {
      nlohmann::json invite{{"switch", sw.hex()},
                            {"index", p},
                            {"sup_code", to_hex(sender_.sup_code)},
                            {"vrs_sup", sender_.vrs_sup.hex()}};
      bus_->send_private(sender_addr, recruit(p).account.address, topic::kInvite, json_bytes(invite));
    }
    bus_->deliver();

    // Mailmen answer invitations.
    for (auto p : pending) {
      auto& mm = recruit(p);
      for (const auto& msg : bus_->recv(mm.account.address)) {
        if (msg.topic != topic::kInvite) continue;
        auto invite = parse_json_bytes(open_private(msg, mm.whisper.secret));
        auto index = invite.at("index").get<std::uint32_t>();
        auto rf = config_.recruit_faults.find(index);
        if (rf != config_.recruit_faults.end()) mm.policy = rf->second;
        nlohmann::json reply{{"switch", sw.hex()}, {"index", index}};
        if (mm.policy == FaultPolicy::refuse ||
            !verify_invitation(*ledger_, agent_, msg.from, mm.account.address, invite)) {
          bus_->send_private(mm.account.address, msg.from, topic::kRefuse, json_bytes(reply));
          continue;
        }
        mm.position = index;
        mm.switch_addr = sw;
        mm.sup_code = abi::bytes_arg(invite, "sup_code");
        mm.vrs_sup = abi::signature_arg(invite, "vrs_sup");
        mm.vrs_m = sign(mm.account, abi::mailman_digest(sw, index));
        reply["vrs_m"] = mm.vrs_m.hex();
        bus_->send_private(mm.account.address, msg.from, topic::kAgree, json_bytes(reply));
      }
    }
    bus_->deliver();

    // Sender countersigns or replaces.
    std::set<std::uint32_t> answered;
    for (const auto& msg : bus_->recv(sender_addr)) {
      auto reply = parse_json_bytes(open_private(msg, sender_.whisper.secret));
      auto p = reply.at("index").get<std::uint32_t>();
      if (p < 1 || p > m || done[p - 1] || msg.from != recruit(p).account.address) continue;
      answered.insert(p);
      if (msg.topic == topic::kRefuse) {
        ++refusals_;
        auto replacement = draw_selection(1, invited).front();
        invited.insert(replacement);
        sender_.selected[p - 1] = replacement;
        continue;
      }
      auto vrs_m = abi::signature_arg(reply, "vrs_m");
      try {
        if (recover_signer(abi::mailman_digest(sw, p), vrs_m) != msg.from) continue;
      } catch (const VerificationError&) {
        continue;
      }
      auto vrs_s = sign(sender_.account, abi::sender_digest(sw, p, vrs_m));
      sender_.agreements[p - 1] = Agreement{p, vrs_s, vrs_m};
      done[p - 1] = true;
      nlohmann::json cs{{"switch", sw.hex()}, {"index", p}, {"vrs_s", vrs_s.hex()}};
      bus_->send_private(sender_addr, msg.from, topic::kCountersign, json_bytes(cs));
    }
    // An invitation lost on the way is retried, then the mailman replaced.
    for (auto p : pending) {
      if (answered.count(p) || done[p - 1]) continue;
      if (++silent_rounds[p - 1] >= 3) {
        auto replacement = draw_selection(1, invited).front();
        invited.insert(replacement);
        sender_.selected[p - 1] = replacement;
        silent_rounds[p - 1] = 0;
      }
    }
    bus_->deliver();

    for (std::uint32_t p = 1; p <= m; ++p) {
      auto& mm = recruit(p);
      for (const auto& msg : bus_->recv(mm.account.address)) {
        if (msg.topic != topic::kCountersign) continue;
        auto cs = parse_json_bytes(open_private(msg, mm.whisper.secret));
        auto vrs_s = abi::signature_arg(cs, "vrs_s");
        try {
          if (recover_signer(abi::sender_digest(sw, p, mm.vrs_m), vrs_s) == sender_addr) mm.vrs_s = vrs_s;
        } catch (const VerificationError&) {
        }
      }
    }
  }
  if (std::find(done.begin(), done.end(), false) != done.end())
    throw ScenarioError("recruitment did not complete");
}

void Simulation::distribute_shares() {
  const auto& sw = sender_.switch_addr;
  const Address sender_addr = sender_.account.address;
  const auto frame = ledger_->frame_of(config_.timeframe_tick());
  const auto& agent = agent_contract();

  Rng share_rng = root_.fork("sender.shares");
  Rng onion_rng = root_.fork("sender.onions");
  Rng enc_rng = root_.fork("sender.encrypt");
  sender_.shares = ss_split(sender_.key, config_.t, config_.n, share_rng);
  sender_.onions.clear();
  for (std::uint32_t i = 1; i <= config_.n; ++i) {
    std::vector<BoxPublicKey> keys;
    for (auto p : layer_positions(i, config_.l))
      keys.push_back(agent.mailman(recruit(p).account.address)->timeframe_pubkeys.at(frame));
    sender_.onions.push_back(onion_wrap(sender_.shares[i - 1], keys, onion_rng));
  }
  sender_.onion_wire = encode_onion_set(sender_.onions);
  bus_->broadcast(sender_addr, topic::kOnions, sender_.onion_wire);

  sender_.bundle = sym_encrypt(sender_.key, encode_agreements(sender_.agreements), enc_rng);
  sender_.vrs_sm = sign(sender_.account, hash_fields({as_bytes("vrs_sm"), sw.view(), sender_.bundle}));
  nlohmann::json bundle_msg{{"switch", sw.hex()}, {"bundle", to_hex(sender_.bundle)}, {"vrs_sm", sender_.vrs_sm.hex()}};
  for (std::uint32_t p = 1; p <= sender_.selected.size(); ++p)
    bus_->send_private(sender_addr, recruit(p).account.address, topic::kBundle, json_bytes(bundle_msg));

  sender_.delivery = sym_encrypt(sender_.key, delivery_plaintext(sender_.receipt, sender_.info), enc_rng);
  sender_.vrs_st = sign(sender_.account, delivery_digest(sender_.delivery, sender_.onion_wire));
  auto delivery_msg = [&](bool tamper) {
    Bytes ct = sender_.delivery;
    if (tamper && !ct.empty()) ct.back() ^= 0x01;
    return nlohmann::json{{"switch", sw.hex()}, {"delivery", to_hex(ct)}, {"vrs_st", sender_.vrs_st.hex()}};
  };
  bus_->send_private(sender_addr, recipient_.account.address, topic::kDelivery,
                     json_bytes(delivery_msg(config_.tamper_first_delivery)));
  bus_->deliver();

  for (auto& mm : pool_) {
    for (const auto& msg : bus_->recv(mm.account.address)) {
      if (!mm.position) continue;
      if (msg.topic == topic::kOnions && msg.from == sender_addr) {
        mm.onions = decode_onion_set(msg.payload);
      } else if (msg.topic == topic::kBundle) {
        auto b = parse_json_bytes(open_private(msg, mm.whisper.secret));
        auto bundle = abi::bytes_arg(b, "bundle");
        auto vrs_sm = abi::signature_arg(b, "vrs_sm");
        try {
          if (recover_signer(hash_fields({as_bytes("vrs_sm"), sw.view(), bundle}), vrs_sm) == sender_addr) {
            mm.bundle = std::move(bundle);
            mm.vrs_sm = vrs_sm;
          }
        } catch (const VerificationError&) {
        }
      }
    }
  }

  // The recipient checks vrs_st over the delivery and the broadcast
  // onions, and asks for a resend on mismatch.
  for (int attempt = 0; attempt < kMaxRounds; ++attempt) {
    std::optional<nlohmann::json> delivery;
    for (const auto& msg : bus_->recv(recipient_.account.address)) {
      if (msg.topic == topic::kOnions && msg.from == sender_addr) {
        recipient_.onion_wire = msg.payload;
        recipient_.onions = decode_onion_set(msg.payload);
      } else if (msg.topic == topic::kDelivery && msg.from == sender_addr) {
        delivery = parse_json_bytes(open_private(msg, recipient_.whisper.secret));
      }
    }
    bool ok = false;
    if (delivery) {
      auto ct = abi::bytes_arg(*delivery, "delivery");
      try {
        ok = recover_signer(delivery_digest(ct, recipient_.onion_wire), abi::signature_arg(*delivery, "vrs_st")) ==
             sender_addr;
      } catch (const VerificationError&) {
      }
      if (ok) recipient_.delivery = std::move(ct);
    }
    if (ok) break;
    ++resend_requests_;
    bus_->send_private(recipient_.account.address, sender_addr, topic::kResend, json_bytes({{"switch", sw.hex()}}));
    bus_->deliver();
    for (const auto& msg : bus_->recv(sender_addr)) {
      if (msg.topic != topic::kResend) continue;
      bus_->broadcast(sender_addr, topic::kOnions, sender_.onion_wire);
      bus_->send_private(sender_addr, recipient_.account.address, topic::kDelivery, json_bytes(delivery_msg(false)));
    }
    bus_->deliver();
    for (auto& mm : pool_) bus_->recv(mm.account.address);
  }
}

void Simulation::recipient_collect(std::string_view from_topic) {
  for (const auto& msg : bus_->recv(recipient_.account.address)) {
    if (msg.topic != from_topic) continue;
    try {
      auto body = msg.is_private() ? parse_json_bytes(open_private(msg, recipient_.whisper.secret))
                                   : parse_json_bytes(msg.payload);
      if (abi::address_arg(body, "switch") != sender_.switch_addr) continue;
      recipient_.keys.push_back(BoxSecretKey::from(abi::bytes32_arg(body, "privkey")));
    } catch (const std::exception&) {
    }
  }
}

void Simulation::recipient_try_restore() {
  if (recipient_.key) return;
  auto shares = peel_all(recipient_.onions, recipient_.keys, recipient_cache_);
  if (shares.size() < config_.t) return;
  auto key = ss_restore(shares, config_.t);
  try {
    auto [receipt, info] = split_delivery(sym_decrypt(key, recipient_.delivery));
    recipient_.key = key;
    recipient_.receipt = receipt;
    recipient_.info = std::move(info);
  } catch (const std::exception&) {
  }
}

bool Simulation::recipient_submit() {
  if (!recipient_.receipt || recipient_.submitted) return false;
  auto r = call(recipient_.account.address, agent_, fn::kRecipientReceipt,
                {{"receipt", recipient_.receipt->hex()},
                 {"sender", sender_.account.address.hex()},
                 {"switch", sender_.switch_addr.hex()}});
  recipient_.submitted = r.success;
  return r.success;
}

void Simulation::epoch0() {
  ledger_->advance_to_tick(2);
  bus_->set_tick(2);
  ledger_->set_phase("epoch-0");
  const auto& sw = sender_.switch_addr;
  const std::uint32_t m = config_.recruited();

  for (std::uint32_t p = 1; p <= m; ++p) {
    auto& mm = recruit(p);
    if (mm.policy != FaultPolicy::premature) continue;
    nlohmann::json leak{{"switch", sw.hex()}, {"index", p}, {"privkey", mm.frame_key.secret.hex()}};
    bus_->broadcast(mm.account.address, topic::kLeak, json_bytes(leak));
    log_misbehavior(mm.account.address, "premature");
  }
  bus_->deliver();

  auto ensure_switched = [&](MailmanActor& by) {
    if (ledger_->exists(sender_.sup_addr)) return true;
    auto r = call(by.account.address, sw, fn::kDeploySupplementary,
                  {{"switch", sw.hex()}, {"sup_code", to_hex(by.sup_code)}, {"vrs_sup", by.vrs_sup.hex()}});
    return r.success;
  };

  if (auto* reporter = first_dutiful()) {
    const auto frame = ledger_->frame_of(config_.timeframe_tick());
    for (const auto& msg : bus_->recv(reporter->account.address)) {
      if (msg.topic != topic::kLeak || msg.from == reporter->account.address) continue;
      try {
        auto leak = parse_json_bytes(msg.payload);
        if (abi::address_arg(leak, "switch") != sw) continue;
        auto key = BoxSecretKey::from(abi::bytes32_arg(leak, "privkey"));
        // Only genuine keys of registered mailmen are worth reporting.
        bool genuine = false;
        for (const auto& [_, rec] : agent_contract().mailmen()) {
          auto it = rec.timeframe_pubkeys.find(frame);
          if (it != rec.timeframe_pubkeys.end() && box_pairs(key, it->second)) genuine = true;
        }
        if (!genuine || !ensure_switched(*reporter)) continue;
        call(reporter->account.address, sender_.sup_addr, fn::kReportPremature,
             {{"index", abi::u32_arg(leak, "index")}, {"privkey", key.hex()}});
      } catch (const std::exception&) {
      }
    }
  }

  for (std::uint32_t p = 1; p <= m; ++p) {
    auto& mm = recruit(p);
    if (mm.policy != FaultPolicy::false_reporter) continue;
    log_misbehavior(mm.account.address, "false_report");
    if (!ensure_switched(mm)) continue;
    std::uint32_t target = p % m + 1;
    call(mm.account.address, sender_.sup_addr, fn::kReportPremature,
         {{"index", target}, {"privkey", BoxSecretKey::from(mm.rng.fixed<32>()).hex()}});
  }
  for (auto& mm : pool_) bus_->recv(mm.account.address);
  bus_->recv(recipient_.account.address);
}

void Simulation::epoch1() {
  const auto& sw = sender_.switch_addr;
  for (std::uint32_t p = 1; p <= sender_.selected.size(); ++p) {
    auto& mm = recruit(p);
    if (mm.policy == FaultPolicy::absent || mm.policy == FaultPolicy::withhold_light) {
      log_misbehavior(mm.account.address, mm.policy == FaultPolicy::absent ? "absent" : "withhold_light");
      continue;
    }
    if (!present(mm)) {
      log_misbehavior(mm.account.address, "unavailable");
      continue;
    }
    if (mm.policy == FaultPolicy::fake) log_misbehavior(mm.account.address, "fake_key");
    nlohmann::json reveal{{"switch", sw.hex()}, {"privkey", mm.published_key().hex()}};
    bus_->send_private(mm.account.address, recipient_.account.address, topic::kReveal, json_bytes(reveal));
  }
  bus_->deliver();
  recipient_collect(topic::kReveal);
  recipient_try_restore();
  recipient_submit();
}

void Simulation::epoch2() {
  const auto& sw = sender_.switch_addr;
  if (!ledger_->exists(sender_.sup_addr)) {
    if (auto* d = first_dutiful())
      call(d->account.address, sw, fn::kDeploySupplementary,
           {{"switch", sw.hex()}, {"sup_code", to_hex(d->sup_code)}, {"vrs_sup", d->vrs_sup.hex()}});
  }
  if (!ledger_->exists(sender_.sup_addr)) return;

  for (std::uint32_t p = 1; p <= sender_.selected.size(); ++p) {
    auto& mm = recruit(p);
    if (mm.policy == FaultPolicy::absent) {
      log_misbehavior(mm.account.address, "absent");
      continue;
    }
    if (!present(mm)) {
      log_misbehavior(mm.account.address, "unavailable");
      continue;
    }
    if (mm.policy == FaultPolicy::fake) log_misbehavior(mm.account.address, "fake_key");
    nlohmann::json pk{{"switch", sw.hex()}, {"privkey", mm.published_key().hex()}};
    bus_->broadcast(mm.account.address, topic::kPublicKey, json_bytes(pk));
  }
  bus_->deliver();

  // Every mailman sees the same broadcasts, so the first dutiful one that
  // holds the identity bundle restores the key and reveals identities.
  bool attempted = false;
  for (std::uint32_t p = 1; p <= sender_.selected.size(); ++p) {
    auto& mm = recruit(p);
    auto inbox = bus_->recv(mm.account.address);
    if (attempted || !mm.dutiful() || mm.bundle.empty()) continue;
    attempted = true;
    std::vector<BoxSecretKey> keys;
    for (const auto& msg : inbox) {
      if (msg.topic != topic::kPublicKey) continue;
      try {
        auto body = parse_json_bytes(msg.payload);
        if (abi::address_arg(body, "switch") == sw) keys.push_back(BoxSecretKey::from(abi::bytes32_arg(body, "privkey")));
      } catch (const std::exception&) {
      }
    }
    auto shares = peel_all(mm.onions, keys, public_cache_);
    if (shares.size() < config_.t) continue;
    try {
      auto key = ss_restore(shares, config_.t);
      auto agreements = decode_agreements(sym_decrypt(key, mm.bundle));
      nlohmann::json list = nlohmann::json::array();
      for (const auto& a : agreements) list.push_back(abi::encode(a));
      call(mm.account.address, sender_.sup_addr, fn::kRevealIdentity, {{"agreements", list}});
    } catch (const std::exception&) {
    }
  }
  for (auto& mm : pool_)
    if (!mm.position) bus_->recv(mm.account.address);
  recipient_collect(topic::kPublicKey);
  recipient_try_restore();
}

void Simulation::epoch3() {
  const auto* sup = ledger_->contract_as<SupplementaryContract>(sender_.sup_addr);
  if (!sup) return;
  for (std::uint32_t p = 1; p <= sender_.selected.size(); ++p) {
    auto& mm = recruit(p);
    if (!sup->identities().count(p)) continue;
    if (mm.policy == FaultPolicy::absent) {
      log_misbehavior(mm.account.address, "absent");
      continue;
    }
    if (!present(mm)) {
      log_misbehavior(mm.account.address, "unavailable");
      continue;
    }
    if (mm.policy == FaultPolicy::fake) log_misbehavior(mm.account.address, "fake_key");
    call(mm.account.address, sender_.sup_addr, fn::kRevealPrivkey, {{"index", p}, {"privkey", mm.published_key().hex()}});
  }
}

void Simulation::epoch4() {
  const auto* sup = ledger_->contract_as<SupplementaryContract>(sender_.sup_addr);
  if (!sup) return;
  std::vector<std::pair<std::uint32_t, Address>> absent, fake;
  for (const auto& [index, id] : sup->identities()) {
    auto pk = sup->privkeys().find(index);
    if (pk == sup->privkeys().end()) absent.emplace_back(index, id.mailman);
    else if (!pk->second.matches) fake.emplace_back(index, id.mailman);
  }
  for (const auto& [index, accused] : absent)
    if (auto* r = first_dutiful(accused)) call(r->account.address, sender_.sup_addr, fn::kReportAbsent, {{"index", index}});
  for (const auto& [index, accused] : fake)
    if (auto* r = first_dutiful(accused)) call(r->account.address, sender_.sup_addr, fn::kReportFake, {{"index", index}});

  sup = ledger_->contract_as<SupplementaryContract>(sender_.sup_addr);
  bool any = !sup->premature_reports().empty() || !sup->absent_reports().empty() || !sup->fake_reports().empty();
  if (any)
    if (auto* r = first_dutiful()) call(r->account.address, sender_.sup_addr, fn::kInformAgent, nlohmann::json::object());
}

void Simulation::epoch5() {
  if (service().spec.status == ServiceStatus::pending) recipient_submit();
}

void Simulation::settle() {
  const auto unlock = config_.timeframe_tick() + 5 * config_.epoch_duration;
  if (ledger_->tick() < unlock) ledger_->advance_to_tick(unlock);
  bus_->set_tick(ledger_->tick());
  ledger_->set_phase("settle");
  const auto& sw = sender_.switch_addr;

  if (service().spec.status == ServiceStatus::delivered_light) {
    for (std::uint32_t p = 1; p <= sender_.selected.size(); ++p) {
      auto& mm = recruit(p);
      if (mm.vrs_s.is_zero()) continue;
      auto args = abi::encode(Agreement{p, mm.vrs_s, mm.vrs_m});
      args["switch"] = sw.hex();
      call(mm.account.address, agent_, fn::kProveAgreement, std::move(args));
    }
  }

  std::vector<Address> accounts;
  for (const auto& mm : pool_) accounts.push_back(mm.account.address);
  accounts.push_back(sender_.account.address);
  accounts.push_back(recipient_.account.address);
  for (const auto& a : accounts) {
    const auto& agent = agent_contract();
    const auto* rec = agent.mailman(a);
    bool deposit = rec && rec->status == MailmanStatus::active && ledger_->tick() >= agent.unlock_tick(*ledger_, a);
    if (agent.credit(a) > 0 || deposit) call(a, agent_, fn::kWithdraw, nlohmann::json::object());
  }
}

ScenarioTrace Simulation::run_delivery() {
  setup();
  epoch0();

  const std::uint64_t start = config_.timeframe_tick();
  const std::uint64_t limit = start + 8 * config_.epoch_duration;
  std::set<std::uint32_t> handled;
  for (std::uint64_t tick = start; service().epoch != 6; ++tick) {
    if (tick > limit) throw std::logic_error("epoch machine did not terminate");
    ledger_->advance_to_tick(tick);
    bus_->set_tick(tick);
    auto epoch = service().epoch;
    if (epoch == 6 || handled.count(epoch)) continue;
    handled.insert(epoch);
    ledger_->set_phase(phase_of(epoch));
    switch (epoch) {
      case 1: epoch1(); break;
      case 2: epoch2(); break;
      case 3: epoch3(); break;
      case 4: epoch4(); break;
      case 5: epoch5(); break;
      default: break;
    }
  }
  delivery_state_ = ledger_->onchain_state(true);
  settle();

  ScenarioTrace trace;
  finish(trace);
  return trace;
}

void Simulation::finish(ScenarioTrace& trace) {
  const auto& s = service();
  trace.seed = config_.seed;
  trace.variant = ProtocolVariant::silent;
  trace.outcome = s.spec.status;
  trace.mode = s.mode;
  trace.epoch_path = s.epoch_path;
  trace.agent = agent_;
  trace.sender = sender_.account.address;
  trace.recipient = recipient_.account.address;
  trace.switch_addr = sender_.switch_addr;
  for (const auto& mm : pool_) {
    trace.pool.push_back(mm.account.address);
    trace.policies[mm.account.address] = mm.policy;
  }
  for (std::uint32_t p = 1; p <= sender_.selected.size(); ++p) trace.recruited.push_back(recruit(p).account.address);
  trace.receipts = ledger_->receipts();
  trace.transfers = ledger_->transfers();
  trace.messages = bus_->log();
  trace.observed = bus_->observe();
  trace.misbehavior = misbehavior_;
  for (const auto& r : trace.receipts)
    for (const auto& e : r.events)
      if (e.name == "Slashed")
        trace.slashes.push_back({Address::parse(e.data.at("mailman").get<std::string>()),
                                 e.data.value("reason", std::string("premature")), e.data.at("amount").get<Amount>(),
                                 e.data.value("reward", Amount{0})});
  trace.remunerated = s.remunerated;
  trace.initial_balances = initial_;
  for (const auto& [a, _] : initial_) trace.final_balances[a] = ledger_->balance(a);
  trace.recipient_restored = recipient_.key.has_value();
  trace.info_matches = recipient_.key && recipient_.info == sender_.info;
  trace.resend_requests = resend_requests_;
  trace.refusals = refusals_;
  trace.delivery_state = delivery_state_;
  trace.delivery_state_hash = hash256(as_bytes(delivery_state_.dump()));
  trace.final_state = ledger_->onchain_state(true);
  trace.final_state_hash = ledger_->state_hash(true);
  trace.minted = ledger_->minted();
  trace.gas_sink = ledger_->gas_sink();
  trace.burned = ledger_->burned();
  trace.conserved = ledger_->conserved();
}

ScenarioTrace run_scenario(const ScenarioConfig& config) {
  if (config.variant == ProtocolVariant::strawman) return run_strawman(config);
  Simulation sim(config);
  return sim.run();
}

}  // namespace sd
