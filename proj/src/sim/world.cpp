// Copyright 2026 The ACWP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acwp/sim/world.hpp"

#include <map>
#include <random>
#include <set>

#include "acwp/broker/config.hpp"
#include "acwp/broker/frontend.hpp"
#include "acwp/client/session.hpp"
#include "acwp/federation/routing.hpp"
#include "acwp/protocol/errors.hpp"
#include "acwp/protocol/frame.hpp"
#include "acwp/sim/agents.hpp"
#include "acwp/util/files.hpp"

namespace acwp::sim {

using broker::ConnectionId;
using federation::Side;
using protocol::Document;
using protocol::Envelope;
using protocol::Frame;
using protocol::Value;
using protocol::ValueKind;

namespace {

std::int64_t int_key(const Document& doc, std::string_view key, std::int64_t fallback, std::int64_t min) {
  const Value* v = doc.find(key);
  if (v == nullptr) return fallback;
  if (v->kind() != ValueKind::integer || v->as_integer() < min) {
    throw ConfigError("world config: '" + std::string(key) + "' must be an integer >= " + std::to_string(min));
  }
  return v->as_integer();
}

bool bool_key(const Document& doc, std::string_view key, bool fallback) {
  const Value* v = doc.find(key);
  if (v == nullptr) return fallback;
  if (v->kind() != ValueKind::boolean) throw ConfigError("world config: '" + std::string(key) + "' must be a bool");
  return v->as_boolean();
}

std::vector<std::string> text_list(const Document& doc, std::string_view prefix) {
  std::vector<std::string> out;
  for (std::size_t i = 0;; ++i) {
    const std::string key = std::string(prefix) + "." + std::to_string(i);
    const Value* v = doc.find(key);
    if (v == nullptr) break;
    if (v->kind() != ValueKind::text) throw ConfigError("world config: '" + key + "' must be a string");
    out.push_back(v->as_text());
  }
  return out;
}

const std::set<std::string, std::less<>> kKnownPrefixes{"world", "locals", "net", "met", "bridge", "routes",
                                                        "local_topics"};

std::string detail_of(const Envelope& env) {
  std::string d = env.message_type;
  if (!env.hop_trace.empty()) d += " hops=" + protocol::join_hop_trace(env.hop_trace);
  if (env.correlation_id) d += " corr=" + *env.correlation_id;
  return d;
}

}  // namespace

WorldConfig parse_world_config(const Document& doc) {
  for (const auto& [path, value] : doc.entries()) {
    const auto head = path.substr(0, path.find('.'));
    if (kKnownPrefixes.count(head) == 0) throw ConfigError("world config: unknown key '" + path + "'");
  }
  WorldConfig c;
  if (const Value* v = doc.find("world.central")) {
    if (v->kind() != ValueKind::text || !protocol::is_valid_client_id(v->as_text())) {
      throw ConfigError("world config: 'world.central' must be a broker id");
    }
    c.central_id = v->as_text();
  }
  c.locals = text_list(doc, "locals");
  if (doc.contains("world.cwps")) {
    if (!c.locals.empty()) throw ConfigError("world config: give either 'world.cwps' or 'locals', not both");
    const auto n = int_key(doc, "world.cwps", 0, 0);
    for (std::int64_t i = 1; i <= n; ++i) c.locals.push_back("cwp" + std::to_string(i));
  }
  std::set<std::string> ids{c.central_id};
  for (std::size_t i = 0; i < c.locals.size(); ++i) {
    const auto& id = c.locals[i];
    if (!protocol::is_valid_client_id(id)) {
      throw ConfigError("world config: 'locals." + std::to_string(i) + "' is not a valid broker id");
    }
    if (!ids.insert(id).second) {
      throw ConfigError("world config: duplicate broker id '" + id + "' at locals." + std::to_string(i));
    }
  }
  c.seed = static_cast<std::uint64_t>(int_key(doc, "world.seed", 1, 0));
  c.ack_deadline_ms = int_key(doc, "world.ack_deadline_ms", c.ack_deadline_ms, 1);
  c.max_time_ms = int_key(doc, "world.max_time_ms", c.max_time_ms, 1);
  c.legacy = bool_key(doc, "world.legacy", c.legacy);
  c.recovery = bool_key(doc, "world.recovery", c.recovery);
  c.net.latency_ms = int_key(doc, "net.latency_ms", c.net.latency_ms, 0);
  c.net.jitter_ms = int_key(doc, "net.jitter_ms", c.net.jitter_ms, 0);
  c.net.drop_permille = static_cast<std::uint32_t>(int_key(doc, "net.drop_permille", 0, 0));
  if (c.net.drop_permille > 1000) throw ConfigError("world config: 'net.drop_permille' must be <= 1000");
  c.met_period_ms = int_key(doc, "met.period_ms", 0, 0);
  c.bridge_buffer_limit = static_cast<std::size_t>(
      int_key(doc, "bridge.buffer_limit", static_cast<std::int64_t>(c.bridge_buffer_limit), 0));
  c.routes = text_list(doc, "routes");
  if (doc.contains("local_topics.0")) c.local_topics = text_list(doc, "local_topics");
  return c;
}

WorldConfig load_world_config(const std::filesystem::path& file) {
  std::string text;
  try {
    text = util::read_file(file);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_world_config(protocol::parse_document(text));
  } catch (const protocol::ProtocolError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::string cwp_select(client::Session& session, std::string_view callsign) {
  return session.publish("selection", "selection.update",
                         Document{{"callsign", Value::text(std::string(callsign))},
                                  {"position", Value::text(session.client_id())}});
}

namespace detail {
struct WorldImpl;
}

namespace {

struct Link;

class LinkTransport : public client::Transport {
 public:
  LinkTransport(detail::WorldImpl& world, Link& link) : world_(world), link_(link) {}
  void send(const Frame& frame) override;

 private:
  detail::WorldImpl& world_;
  Link& link_;
};

struct Link {
  std::string client;
  std::string broker;
  ConnectionId conn = 0;
  std::int64_t last_up = 0;
  std::int64_t last_down = 0;
  bool partitioned = false;
  bool closed = false;
  std::vector<std::pair<bool, std::string>> held;  // (upstream, bytes)
  std::unique_ptr<LinkTransport> transport;
  std::unique_ptr<client::Session> session;
};

struct SimBroker;

class LogObserver : public broker::BrokerObserver {
 public:
  LogObserver(detail::WorldImpl& world, std::string id) : world_(world), id_(std::move(id)) {}
  void on_accept(std::string_view client, const Envelope& env) override;
  void on_reject(std::string_view client, const Envelope* env, const Status& status) override;
  void on_drop(const Envelope& env) override;
  void on_deliver(const broker::Delivery& d) override;
  void on_ack(std::string_view client, std::string_view sub, std::string_view id, bool known) override;
  void on_dead_letter(const broker::DlqRecord& r) override;

 private:
  detail::WorldImpl& world_;
  std::string id_;
};

struct SimBroker {
  std::string id;
  std::unique_ptr<broker::Broker> engine;
  std::unique_ptr<broker::Frontend> frontend;
  std::unique_ptr<LogObserver> observer;
  std::map<ConnectionId, Link*> links;
  ConnectionId next_conn = 1;
  std::set<std::int64_t> tick_times;
};

struct Cwp {
  std::string id;
  Link* link = nullptr;
  CwpReplica replica;
  std::set<std::string> withheld;
  bool late = false;
  bool excluded = false;
  bool subscribed = false;
};

struct Bridge {
  std::unique_ptr<federation::BridgeCore> core;
  Link* local = nullptr;
  Link* central = nullptr;
  bool detached = false;
};

}  // namespace

namespace detail {

struct WorldImpl {
  WorldConfig config;
  std::int64_t now = 0;
  std::int64_t setup_end = 0;
  std::uint64_t seq = 0;
  std::map<std::pair<std::int64_t, std::uint64_t>, std::function<void()>> queue;
  std::mt19937_64 rng;
  EventLog log;
  std::shared_ptr<const protocol::SchemaSet> schemas = demo_schemas();
  federation::RuleSet rules;
  federation::Federation fed;

  std::map<std::string, std::unique_ptr<SimBroker>, std::less<>> brokers;
  std::vector<std::unique_ptr<Link>> links;
  std::map<std::string, Link*, std::less<>> actors;  // client id -> link
  std::map<std::string, Cwp, std::less<>> cwps;
  std::map<std::string, Bridge, std::less<>> bridges;

  FplOwnerState owner;
  std::optional<QnhSourceState> qnh;
  std::int64_t owner_qnh = 0;
  std::set<std::string> legacy_seen;
  std::size_t recovered = 0;

  explicit WorldImpl(WorldConfig c)
      : config(std::move(c)), rng(config.seed), fed(config.central_id) {}

  void record(std::string broker, std::string kind, std::string topic, std::string message_id,
              std::string client, std::string detail) {
    log.append({now, std::move(broker), std::move(kind), std::move(topic), std::move(message_id),
                std::move(client), std::move(detail)});
  }

  void schedule(std::int64_t at, std::function<void()> fn) {
    queue.emplace(std::make_pair(std::max(at, now), seq++), std::move(fn));
  }

  void run() {
    while (!queue.empty()) {
      auto it = queue.begin();
      if (it->first.first > config.max_time_ms) break;
      now = it->first.first;
      auto fn = std::move(it->second);
      queue.erase(it);
      fn();
    }
  }

  std::int64_t latency() {
    std::int64_t lat = config.net.latency_ms;
    if (config.net.jitter_ms > 0) lat += static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(config.net.jitter_ms + 1));
    return lat;
  }

  bool dropped() { return config.net.drop_permille > 0 && rng() % 1000 < config.net.drop_permille; }

  // -- brokers --------------------------------------------------------------

  SimBroker& add_broker(const std::string& id, bool central) {
    auto b = std::make_unique<SimBroker>();
    b->id = id;
    broker::BrokerOptions opts;
    opts.id = id;
    opts.schemas = schemas;
    opts.clock = [this] { return now; };
    b->engine = std::make_unique<broker::Broker>(opts);
    b->observer = std::make_unique<LogObserver>(*this, id);
    b->engine->set_observer(b->observer.get());
    b->frontend = std::make_unique<broker::Frontend>(*b->engine, central ? "central" : "local");
    for (const char* domain : {"fpl", "met"}) b->engine->declare_domain(domain, config.ack_deadline_ms);
    if (!central) {
      for (const auto& t : config.local_topics) {
        broker::TopicDescriptor d;
        d.name = t;
        d.scope = broker::TopicScope::local;
        d.ack_deadline_ms = config.ack_deadline_ms;
        b->engine->declare_topic(d);
      }
    }
    auto& ref = *b;
    brokers.emplace(id, std::move(b));
    record(id, "broker_up", "", "", "", central ? "central" : "local");
    return ref;
  }

  SimBroker& broker_of(std::string_view id) {
    auto it = brokers.find(id);
    if (it == brokers.end()) throw std::out_of_range("no broker '" + std::string(id) + "'");
    return *it->second;
  }

  void schedule_tick(SimBroker& b) {
    auto d = b.engine->next_deadline();
    if (!d) return;
    const std::int64_t t = std::max(*d + 1, now);
    if (!b.tick_times.insert(t).second) return;
    schedule(t, [this, &b, t] {
      b.tick_times.erase(t);
      route(b, b.frontend->tick(now));
      schedule_tick(b);
    });
  }

  void route(SimBroker& b, std::vector<broker::Outbound> out) {
    for (auto& o : out) {
      auto it = b.links.find(o.connection);
      if (it == b.links.end()) continue;
      send(*it->second, false, protocol::encode_frame(o.frame), o.close);
    }
  }

  // -- links ----------------------------------------------------------------

  Link& open_link(const std::string& client, const std::string& broker_id, client::SessionOptions opts) {
    auto& b = broker_of(broker_id);
    auto link = std::make_unique<Link>();
    link->client = client;
    link->broker = broker_id;
    link->conn = b.next_conn++;
    link->transport = std::make_unique<LinkTransport>(*this, *link);
    opts.client_id = client;
    opts.schemas = schemas;
    opts.clock = [this] { return now; };
    link->session = std::make_unique<client::Session>(std::move(opts), *link->transport);
    auto* raw = link.get();
    link->session->set_error_callback([this, raw](const Status& st, std::string_view ref) {
      record(raw->broker, "error", "", std::string(ref), raw->client, st.to_string());
    });
    b.links[raw->conn] = raw;
    links.push_back(std::move(link));
    raw->session->connect([this, raw](const Status& st) {
      record(raw->broker, st.ok() ? "connected" : "error", "", "", raw->client, st.ok() ? "" : st.to_string());
    });
    return *raw;
  }

  void send(Link& link, bool up, std::string bytes, bool close = false) {
    if (link.closed) return;
    if (link.partitioned) {
      link.held.emplace_back(up, std::move(bytes));
      return;
    }
    if (dropped()) {
      record(link.broker, "net_drop", "", "", link.client, up ? "up" : "down");
      return;
    }
    auto& last = up ? link.last_up : link.last_down;
    const std::int64_t at = std::max(now + latency(), last);
    last = at;
    Link* l = &link;
    schedule(at, [this, l, up, bytes = std::move(bytes), close] {
      if (up) {
        arrive_at_broker(*l, bytes);
      } else {
        arrive_at_client(*l, bytes, close);
      }
    });
  }

  void arrive_at_broker(Link& link, const std::string& bytes) {
    auto& b = broker_of(link.broker);
    if (b.links.count(link.conn) == 0) return;
    try {
      auto frame = protocol::decode_frame(std::string_view(bytes));
      route(b, b.frontend->handle(link.conn, frame, now));
    } catch (const protocol::ProtocolError& e) {
      route(b, b.frontend->protocol_failure(link.conn, e));
    }
    schedule_tick(b);
  }

  void arrive_at_client(Link& link, const std::string& bytes, bool close) {
    if (link.closed) return;
    Frame frame = protocol::decode_frame(std::string_view(bytes));
    auto in = link.session->on_frame(frame);
    for (auto& w : in.control) w();
    for (auto& w : in.deliveries) w();
    if (close) {
      link.closed = true;
      broker_of(link.broker).links.erase(link.conn);
      for (auto& w : link.session->on_transport_closed()) w();
    }
  }

  void partition(Link& link) { link.partitioned = true; }

  void heal(Link& link) {
    link.partitioned = false;
    auto held = std::move(link.held);
    link.held.clear();
    for (auto& [up, bytes] : held) send(link, up, std::move(bytes));
  }

  // -- components -------------------------------------------------------------

  client::Session& actor_session(std::string_view actor) {
    auto it = actors.find(actor);
    if (it == actors.end()) throw std::out_of_range("unknown actor '" + std::string(actor) + "'");
    return *it->second->session;
  }

  void add_owner() {
    client::SessionOptions opts;
    auto& link = open_link("fdps", config.central_id, opts);
    actors["fdps"] = &link;
    Link* l = &link;
    link.session->own_domain(
        "fpl",
        [this, l](const Envelope& c) {
          record(l->broker, "owner_recv", c.topic, c.message_id, l->client, c.message_type);
          auto result = fpl_owner_apply(owner, c);
          for (const auto& o : result.outputs) {
            std::string detail = o.message_type + " corr=" + c.message_id;
            if (const Value* r = o.payload.find("revision")) detail += " rev=" + r->display();
            if (const Value* r = o.payload.find("reason")) detail += " reason=" + r->as_text();
            record(l->broker, "owner_out",
                   o.target == client::OwnerOutput::Target::publication ? "fpl.publication" : "fpl.rejection",
                   "", l->client, detail);
          }
          return result.outputs;
        },
        [this, l](const Status& st) {
          record(l->broker, st.ok() ? "owned" : "error", "fpl.contribution", "", l->client,
                 st.ok() ? "fpl" : st.to_string());
        });
  }

  void add_met_source() {
    client::SessionOptions opts;
    auto& link = open_link("metsrc", config.central_id, opts);
    actors["metsrc"] = &link;
    Link* l = &link;
    link.session->own_domain(
        "met",
        [this, l](const Envelope& c) {
          record(l->broker, "owner_recv", c.topic, c.message_id, l->client, c.message_type);
          std::vector<client::OwnerOutput> out;
          if (c.message_type == "met.update") {
            owner_qnh = c.payload.find("qnh")->as_integer();
            out.push_back({client::OwnerOutput::Target::publication, "met.update", c.payload});
          }
          return out;
        },
        [this, l](const Status& st) {
          record(l->broker, st.ok() ? "owned" : "error", "met.contribution", "", l->client,
                 st.ok() ? "met" : st.to_string());
        });
    if (config.met_period_ms > 0) qnh.emplace(config.met_period_ms, config.seed ^ 0x51c0ffeeULL);
  }

  void schedule_qnh() {
    if (!qnh) return;
    schedule(setup_end + qnh->next_due_ms, [this] { qnh_tick(); });
  }

  void qnh_tick() {
    auto& s = *qnh;
    auto doc = qnh_source_tick(s, now - setup_end);
    if (doc) {
      owner_qnh = s.qnh;
      auto& session = actor_session("metsrc");
      try {
        const auto id = session.publish("met.publication", "met.update", std::move(*doc));
        record(config.central_id, "qnh", "met.publication", id, "metsrc", std::to_string(s.qnh));
      } catch (const client::ClientError& e) {
        record(config.central_id, "error", "met.publication", "", "metsrc", e.what());
      }
    }
    schedule(setup_end + s.next_due_ms, [this] { qnh_tick(); });
  }

  void add_recovery() {
    client::SessionOptions opts;
    auto& link = open_link("recovery", config.central_id, opts);
    actors["recovery"] = &link;
    Link* l = &link;
    for (const auto& info : broker_of(config.central_id).engine->list_topics()) {
      if (info.descriptor.kind != broker::TopicKind::dead_letter) continue;
      l->session->subscribe(info.descriptor.name, [this, l](const Envelope& env) {
        ++recovered;
        auto rec = broker::DlqRecord::from_envelope(env);
        if (rec) {
          record(l->broker, "recovered", rec->original_topic, rec->original_message_id, rec->failed_client,
                 std::string(broker::dlq_reason_name(rec->reason)) + " " + rec->failed_subscription_id);
        } else {
          record(l->broker, "recovered", env.topic, env.message_id, "", "unreadable");
        }
      });
    }
  }

  void add_legacy() {
    client::SessionOptions opts;
    auto& link = open_link("legacy", config.central_id, opts);
    actors["legacy"] = &link;
  }

  client::MessageHandler cwp_handler(Cwp& cwp) {
    Cwp* c = &cwp;
    return [this, c](const Envelope& env) {
      const Link& l = *c->link;
      std::string kind = "recv";
      std::string detail = env.message_type;
      if (env.topic == "fpl.publication" || env.topic == "met.publication") {
        const bool applied = cwp_apply(c->replica, env);
        kind = applied ? "apply" : "stale";
        if (const Value* cs = env.payload.find("callsign")) detail += " " + cs->display();
        if (const Value* r = env.payload.find("revision")) detail += " rev=" + r->display();
        if (const Value* q = env.payload.find("qnh")) detail += " qnh=" + q->display();
      } else if (env.topic == "fpl.rejection") {
        kind = "rejected";
        if (const Value* r = env.payload.find("reason")) detail += " " + r->as_text();
      } else if (const Value* cs = env.payload.find("callsign")) {
        detail += " " + cs->display();
      }
      if (env.correlation_id) detail += " corr=" + *env.correlation_id;
      record(l.broker, kind, env.topic, env.message_id, l.client, detail);
      if (c->withheld.count(env.topic) == 0 && c->withheld.count("*") == 0) {
        c->link->session->ack(subscription_of(*c, env.topic), env.message_id);
      }
    };
  }

  std::map<std::string, std::map<std::string, std::string>> cwp_subs;  // cwp -> topic -> sub id

  std::string subscription_of(const Cwp& c, const std::string& topic) {
    return cwp_subs[c.id][topic];
  }

  void cwp_subscribe(Cwp& c, const std::string& topic) {
    Cwp* cp = &c;
    const auto id = c.link->session->subscribe(topic, cwp_handler(c), [this, cp, topic](const Status& st) {
      if (st.ok() && topic == "fpl.publication") cp->subscribed = true;
      record(cp->link->broker, st.ok() ? "subscribed" : "error", topic, "", cp->id, st.ok() ? "" : st.to_string());
    });
    cwp_subs[c.id][topic] = id;
  }

  void add_cwp(const std::string& id, bool late) {
    client::SessionOptions opts;
    opts.ack_mode = client::AckMode::manual;
    auto& link = open_link(id, id, opts);
    actors[id] = &link;
    auto& c = cwps[id];
    c.id = id;
    c.link = &link;
    c.late = late;
    for (const char* t : {"fpl.publication", "fpl.rejection", "met.publication"}) cwp_subscribe(c, t);
    for (const auto& t : config.local_topics) cwp_subscribe(c, t);
  }

  void add_bridge(const std::string& local_id) {
    auto& br = bridges[local_id];
    br.core = std::make_unique<federation::BridgeCore>(
        federation::BridgeOptions{local_id, config.central_id, rules, config.bridge_buffer_limit});
    client::SessionOptions opts;
    opts.ack_mode = client::AckMode::manual;
    opts.bridge = true;
    br.local = &open_link(br.core->client_id(), local_id, opts);
    br.central = &open_link(br.core->client_id(), config.central_id, opts);
    Bridge* b = &br;
    for (Side side : {Side::local, Side::central}) {
      Link* link = side == Side::local ? b->local : b->central;
      auto topics = broker_of(link->broker).engine->list_topics();
      for (const auto& t : b->core->subscriptions_for(side, topics)) {
        link->session->subscribe_as(b->core->subscription_id(t), t,
                                    [this, b, side](const Envelope& env) { bridge_message(*b, side, env); });
      }
    }
    record(local_id, "bridge_up", "", "", br.core->client_id(), config.central_id);
  }

  void bridge_message(Bridge& b, Side from, const Envelope& env) {
    auto result = b.core->on_message(from, env);
    const Side to = from == Side::local ? Side::central : Side::local;
    const std::string& dest = b.core->broker_id(to);
    const char* dir = from == Side::local ? "up" : "down";
    using O = federation::BridgeCore::Outcome;
    switch (result.outcome) {
      case O::forwarded:
        record(dest, "forward", env.topic, env.message_id, b.core->client_id(), dir);
        (to == Side::local ? b.local : b.central)->session->publish_relayed(*result.forward);
        break;
      case O::buffered:
        record(dest, "buffer", env.topic, env.message_id, b.core->client_id(), dir);
        break;
      case O::overflow:
        record(dest, "overflow", env.topic, env.message_id, b.core->client_id(), dir);
        break;
      case O::not_routed:
        break;
    }
    if (result.ack()) {
      Link* src = from == Side::local ? b.local : b.central;
      src->session->ack(b.core->subscription_id(env.topic), env.message_id);
    }
  }

  void attach(const std::string& id, bool late) {
    auto st = fed.attach(id);
    if (!st.ok()) {
      record(config.central_id, "error", "", "", id, st.to_string());
      return;
    }
    add_broker(id, false);
    add_bridge(id);
    add_cwp(id, late);
  }

  void detach(const std::string& id) {
    auto it = bridges.find(id);
    if (it == bridges.end() || it->second.detached) {
      record(config.central_id, "error", "", "", id, "unknown-broker");
      return;
    }
    it->second.detached = true;
    it->second.local->session->disconnect();
    it->second.central->session->disconnect();
    fed.detach(id);
    if (auto c = cwps.find(id); c != cwps.end()) c->second.excluded = true;
    record(id, "detached", "", "", it->second.core->client_id(), config.central_id);
  }

  void build() {
    std::string rule_text;
    if (config.routes.empty()) {
      rule_text = std::string(default_routes_text());
    } else {
      for (const auto& r : config.routes) rule_text += "route " + r + "\n";
    }
    std::set<std::string, std::less<>> local_topics(config.local_topics.begin(), config.local_topics.end());
    try {
      rules = federation::load_routing_rules(rule_text, local_topics);
    } catch (const federation::RoutingError& e) {
      throw ConfigError(std::string("world config: routes: ") + e.what());
    }
    add_broker(config.central_id, true);
    add_owner();
    add_met_source();
    if (config.recovery) add_recovery();
    if (config.legacy) add_legacy();
    for (const auto& id : config.locals) attach(id, false);
    run();
    setup_end = now;
    record("", "setup_done", "", "", "", std::to_string(config.locals.size()) + " local");
    schedule_qnh();
  }

  void perform(const Action& a) {
    try {
      perform_unchecked(a);
    } catch (const client::ClientError& e) {
      record("", "error", "", "", a.actor, e.what());
    } catch (const std::out_of_range& e) {
      record("", "error", "", "", a.actor, e.what());
    } catch (const BadLegacyLine& e) {
      record(config.central_id, "error", "", "", a.actor, std::string("bad-legacy-line ") + e.what());
    }
  }

  std::string broker_of_actor(std::string_view actor) {
    auto it = actors.find(actor);
    return it == actors.end() ? std::string() : it->second->broker;
  }

  void perform_unchecked(const Action& a) {
    switch (a.kind) {
      case ActionKind::contribute: {
        const auto& type = a.args[0];
        const auto domain = type.substr(0, type.find('.'));
        const auto id = actor_session(a.actor).contribute(domain, type, a.payload);
        record(broker_of_actor(a.actor), "contribute", broker::contribution_topic(domain), id, a.actor, type);
        break;
      }
      case ActionKind::publish: {
        const auto id = actor_session(a.actor).publish(a.args[0], a.args[1], a.payload);
        record(broker_of_actor(a.actor), "publish", a.args[0], id, a.actor, a.args[1]);
        break;
      }
      case ActionKind::subscribe: {
        if (auto c = cwps.find(a.actor); c != cwps.end()) {
          cwp_subscribe(c->second, a.args[0]);
        } else {
          Link* l = actors.at(a.actor);
          l->session->subscribe(a.args[0], [this, l](const Envelope& env) {
            record(l->broker, "recv", env.topic, env.message_id, l->client, env.message_type);
          });
        }
        break;
      }
      case ActionKind::withhold_ack: {
        auto& c = cwps.at(a.actor);
        if (a.args.size() > 1 && a.args[1] == "off") {
          c.withheld.erase(a.args[0]);
        } else {
          c.withheld.insert(a.args[0]);
        }
        record(c.link->broker, "withhold_ack", a.args[0], "", a.actor, a.args.size() > 1 ? "off" : "on");
        break;
      }
      case ActionKind::disconnect: {
        actor_session(a.actor).disconnect();
        if (auto c = cwps.find(a.actor); c != cwps.end()) c->second.excluded = true;
        record(broker_of_actor(a.actor), "disconnect", "", "", a.actor, "");
        break;
      }
      case ActionKind::attach_broker:
        attach(a.args[0], true);
        break;
      case ActionKind::detach_broker:
        detach(a.args[0]);
        break;
      case ActionKind::partition:
      case ActionKind::heal: {
        auto it = bridges.find(a.args[0]);
        if (it == bridges.end()) throw std::out_of_range("no bridge for '" + a.args[0] + "'");
        auto& b = it->second;
        if (a.kind == ActionKind::partition) {
          partition(*b.central);
          b.core->set_reachable(Side::central, false);
          record(a.args[0], "partition", "", "", b.core->client_id(), config.central_id);
        } else {
          heal(*b.central);
          record(a.args[0], "heal", "", "", b.core->client_id(), config.central_id);
          for (auto& env : b.core->set_reachable(Side::central, true)) {
            record(config.central_id, "forward", env.topic, env.message_id, b.core->client_id(), "up");
            b.central->session->publish_relayed(env);
          }
        }
        break;
      }
      case ActionKind::select: {
        const auto id = cwp_select(actor_session(a.actor), a.args[0]);
        record(broker_of_actor(a.actor), "select", "selection", id, a.actor, a.args[0]);
        break;
      }
      case ActionKind::legacy: {
        auto c = legacy_agent_translate(a.args[0], legacy_seen);
        const auto id = actor_session(a.actor).contribute("fpl", c.message_type, std::move(c.payload));
        record(broker_of_actor(a.actor), "contribute", "fpl.contribution", id, a.actor, c.message_type);
        break;
      }
    }
  }
};

}  // namespace detail

void LinkTransport::send(const Frame& frame) { world_.send(link_, true, protocol::encode_frame(frame)); }

void LogObserver::on_accept(std::string_view client, const Envelope& env) {
  world_.record(id_, "accept", env.topic, env.message_id, std::string(client), detail_of(env));
}
void LogObserver::on_reject(std::string_view client, const Envelope* env, const Status& status) {
  world_.record(id_, "reject", env ? env->topic : "", env ? env->message_id : "", std::string(client),
                std::string(error_code_name(status.code())));
}
void LogObserver::on_drop(const Envelope& env) {
  world_.record(id_, "drop", env.topic, env.message_id, "", "");
}
void LogObserver::on_deliver(const broker::Delivery& d) {
  world_.record(id_, "deliver", d.envelope.topic, d.envelope.message_id, d.client_id, d.subscription_id);
}
void LogObserver::on_ack(std::string_view client, std::string_view sub, std::string_view id, bool known) {
  world_.record(id_, known ? "ack" : "late_ack", "", std::string(id), std::string(client), std::string(sub));
}
void LogObserver::on_dead_letter(const broker::DlqRecord& r) {
  world_.record(id_, "dead_letter", r.original_topic, r.original_message_id, r.failed_client,
                std::string(broker::dlq_reason_name(r.reason)) + " " + r.failed_subscription_id);
}

// ---------------------------------------------------------------------------

SimWorld::SimWorld(WorldConfig config) : impl_(std::make_unique<detail::WorldImpl>(std::move(config))) { impl_->build(); }
SimWorld::~SimWorld() = default;

const WorldConfig& SimWorld::config() const { return impl_->config; }
std::int64_t SimWorld::now() const { return impl_->now; }
std::int64_t SimWorld::setup_end() const { return impl_->setup_end; }
const EventLog& SimWorld::log() const { return impl_->log; }

std::vector<std::string> SimWorld::broker_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, b] : impl_->brokers) out.push_back(id);
  return out;
}

broker::Broker& SimWorld::broker(std::string_view id) { return *impl_->broker_of(id).engine; }
const federation::Federation& SimWorld::federation() const { return impl_->fed; }
const FplOwnerState& SimWorld::owner_state() const { return impl_->owner; }
std::int64_t SimWorld::owner_qnh() const { return impl_->owner_qnh; }

std::vector<std::string> SimWorld::cwp_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, c] : impl_->cwps) out.push_back(id);
  return out;
}

CwpReplica& SimWorld::replica(std::string_view cwp) {
  auto it = impl_->cwps.find(cwp);
  if (it == impl_->cwps.end()) throw std::out_of_range("no cwp '" + std::string(cwp) + "'");
  return it->second.replica;
}

const CwpReplica& SimWorld::replica(std::string_view cwp) const {
  auto it = impl_->cwps.find(cwp);
  if (it == impl_->cwps.end()) throw std::out_of_range("no cwp '" + std::string(cwp) + "'");
  return it->second.replica;
}

bool SimWorld::in_convergence_set(std::string_view cwp) const {
  auto it = impl_->cwps.find(cwp);
  if (it == impl_->cwps.end()) return false;
  const auto& c = it->second;
  return !c.late && !c.excluded && c.subscribed && !c.link->closed;
}

std::size_t SimWorld::recovered_count() const { return impl_->recovered; }
std::size_t SimWorld::pending_events() const { return impl_->queue.size(); }

void SimWorld::perform(const Action& action) { impl_->perform(action); }
void SimWorld::schedule(std::int64_t at_ms, std::function<void()> fn) { impl_->schedule(at_ms, std::move(fn)); }
void SimWorld::run() { impl_->run(); }

std::unique_ptr<SimWorld> build_world(const WorldConfig& config) { return std::make_unique<SimWorld>(config); }

const EventLog& run_scenario(SimWorld& world, const Scenario& script) {
  const auto base = world.setup_end();
  for (const auto& a : script.actions) {
    world.schedule(base + a.at_ms, [&world, a] { world.perform(a); });
  }
  world.run();
  return world.log();
}

ConvergenceReport assert_converged(const SimWorld& world, std::string_view domain) {
  ConvergenceReport report;
  for (const auto& id : world.cwp_ids()) {
    if (!world.in_convergence_set(id)) continue;
    const auto& replica = world.replica(id);
    if (domain == "met") {
      if (world.owner_qnh() != 0 && replica.qnh != world.owner_qnh()) {
        report.diffs.push_back("qnh: " + id + " has " + (replica.qnh ? std::to_string(*replica.qnh) : "none") +
                               ", owner " + std::to_string(world.owner_qnh()));
      }
      continue;
    }
    const auto& owner = world.owner_state().plans;
    for (const auto& [cs, fp] : owner) {
      auto it = replica.plans.find(cs);
      if (it == replica.plans.end()) {
        report.diffs.push_back(cs + ": missing at " + id);
      } else if (!(it->second == fp)) {
        report.diffs.push_back(cs + ": " + id + " has revision " + std::to_string(it->second.revision) +
                               ", owner revision " + std::to_string(fp.revision) +
                               (it->second.revision == fp.revision ? " (fields differ)" : ""));
      }
    }
    for (const auto& [cs, fp] : replica.plans) {
      if (owner.count(cs) == 0) report.diffs.push_back(cs + ": " + id + " holds a plan the owner does not");
    }
  }
  report.ok = report.diffs.empty();
  return report;
}

}  // namespace acwp::sim
