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

#include <algorithm>
#include <map>
#include <set>

#include "acwp/broker/broker.hpp"
#include "acwp/broker/config.hpp"
#include "acwp/broker/frontend.hpp"
#include "acwp/sim/world.hpp"
#include "doctest.h"
#include "support/gen.hpp"

using namespace acwp;
using namespace acwp::broker;
using protocol::Document;
using protocol::Value;
namespace gen = acwp::testing;

namespace {

struct Fixture {
  std::int64_t now = 1000;
  std::map<std::string, std::uint64_t> seq;
  Broker b{[this] {
    BrokerOptions o;
    o.id = "central";
    o.clock = [this] { return now; };
    return o;
  }()};

  Envelope env(const std::string& client, const std::string& topic, Document payload = {},
               std::string type = "any") {
    Envelope e;
    e.topic = topic;
    e.sender_id = client;
    e.message_id = protocol::make_message_id(client, ++seq[client]);
    e.message_type = std::move(type);
    e.timestamp_ms = now;
    e.payload = std::move(payload);
    return e;
  }
  Status publish(const std::string& client, const std::string& topic) { return b.publish(client, env(client, topic)); }
};

}  // namespace

TEST_CASE("declare_topic") {
  Fixture f;
  CHECK(f.b.declare_topic({"qnh"}));
  CHECK(f.b.topic("qnh.dlq").has_value());
  CHECK(f.b.topic("qnh.dlq")->kind == TopicKind::dead_letter);
  CHECK(f.b.declare_topic({"qnh"}));
  TopicDescriptor other{"qnh"};
  other.ack_deadline_ms = 5;
  CHECK(f.b.declare_topic(other).code() == ErrorCode::already_declared);
  CHECK(f.b.declare_topic({"x.dlq"}).code() == ErrorCode::reserved_suffix);
  CHECK(f.b.declare_topic({"Bad Name"}).code() == ErrorCode::invalid_argument);
}

TEST_CASE("declare_domain") {
  Fixture f;
  CHECK(f.b.declare_domain("fpl"));
  for (const char* t : {"fpl.contribution", "fpl.publication", "fpl.rejection", "fpl.contribution.dlq",
                        "fpl.publication.dlq", "fpl.rejection.dlq"}) {
    CHECK(f.b.topic(t).has_value());
  }
  CHECK(f.b.topic("fpl.contribution")->kind == TopicKind::contribution);
  CHECK(f.b.topic("fpl.rejection")->domain == std::optional<std::string>("fpl"));
  CHECK(f.b.declare_domain("fpl").code() == ErrorCode::already_declared);
  f.b.connect("cwp1");
  CHECK(f.b.subscribe("cwp1", "fpl.contribution", "s").code() == ErrorCode::ownership_violation);
}

TEST_CASE("register_owner") {
  Fixture f;
  f.b.declare_domain("fpl");
  f.b.connect("fdps");
  f.b.connect("cwp1");
  CHECK(f.b.register_owner("fdps", "fpl"));
  CHECK(f.b.register_owner("fdps", "fpl"));
  CHECK(f.b.register_owner("cwp1", "fpl").code() == ErrorCode::already_owned);
  CHECK(f.b.register_owner("fdps", "met").code() == ErrorCode::unknown_domain);
  CHECK(f.b.owner("fpl") == std::optional<std::string>("fdps"));
  CHECK(f.publish("cwp1", "fpl.contribution"));
  CHECK(f.b.dispatch(f.now).size() == 1);
}

TEST_CASE("subscribe and unsubscribe") {
  Fixture f;
  f.b.declare_domain("fpl");
  f.b.connect("fdps");
  f.b.connect("cwp1");
  f.b.register_owner("fdps", "fpl");
  CHECK(f.b.subscribe("cwp1", "fpl.publication", "p1"));
  CHECK(f.b.subscribe("cwp1", "fpl.contribution", "c1").code() == ErrorCode::ownership_violation);
  CHECK(f.b.subscribe("fdps", "fpl.contribution", "c2"));
  CHECK(f.b.subscribe("cwp1", "nope", "x").code() == ErrorCode::unknown_topic);
  CHECK(f.b.subscribe("cwp1", "fpl.rejection", "p1").code() == ErrorCode::duplicate_subscription);
  CHECK(f.b.unsubscribe("cwp1", "p1"));
  CHECK(f.b.unsubscribe("cwp1", "p1").code() == ErrorCode::unknown_subscription);
}

TEST_CASE("unsubscribe dead-letters in-flight messages") {
  Fixture f;
  f.b.declare_topic({"qnh"});
  f.b.connect("src");
  f.b.connect("cwp1");
  f.b.connect("recovery");
  f.b.subscribe("cwp1", "qnh", "s1");
  f.b.subscribe("recovery", "qnh.dlq", "r");
  f.publish("src", "qnh");
  f.publish("src", "qnh");
  CHECK(f.b.dispatch(f.now).size() == 2);
  std::vector<DlqRecord> dead;
  CHECK(f.b.unsubscribe("cwp1", "s1", &dead));
  REQUIRE(dead.size() == 2);
  CHECK(dead[0].original_message_id == "src:1");
  CHECK(dead[1].original_message_id == "src:2");
  CHECK(dead[0].reason == DlqReason::client_disconnected);
  const auto dlq = f.b.dispatch(f.now);
  REQUIRE(dlq.size() == 2);
  CHECK(dlq[0].envelope.topic == "qnh.dlq");
  CHECK(DlqRecord::from_envelope(dlq[0].envelope) == dead[0]);
  CHECK(f.b.stats("qnh").dead_lettered == 2);
}

TEST_CASE("publish ACL and validation") {
  Fixture f;
  f.b.declare_domain("fpl");
  f.b.connect("fdps");
  f.b.connect("cwp1");
  f.b.register_owner("fdps", "fpl");
  CHECK(f.publish("cwp1", "fpl.contribution"));
  CHECK(f.publish("cwp1", "fpl.publication").code() == ErrorCode::ownership_violation);
  CHECK(f.publish("cwp1", "fpl.rejection").code() == ErrorCode::ownership_violation);
  CHECK(f.publish("fdps", "fpl.publication"));
  CHECK(f.publish("cwp1", "nowhere").code() == ErrorCode::unknown_topic);
  CHECK(f.publish("cwp1", "fpl.publication.dlq").code() == ErrorCode::ownership_violation);

  BrokerOptions o;
  o.id = "central";
  o.schemas = sim::demo_schemas();
  Broker strict(o);
  strict.declare_domain("met");
  strict.connect("metsrc");
  strict.register_owner("metsrc", "met");
  auto e = f.env("metsrc", "met.publication", {{"qnh", Value::text("x")}}, "met.update");
  const auto st = strict.publish("metsrc", e);
  CHECK(st.code() == ErrorCode::schema_violation);
  CHECK(st.violations() == std::vector<std::string>{"wrong-kind qnh"});
  e.message_type = "met.unknown";
  CHECK(strict.publish("metsrc", e).code() == ErrorCode::unknown_message_type);
}

TEST_CASE("ownership ACL truth table") {
  struct Cell {
    bool owner;
    std::string topic;
    bool subscribe;
    bool allowed;
  };
  const std::vector<std::string> topics{"fpl.contribution", "fpl.publication", "fpl.rejection", "qnh"};
  int checked = 0;
  for (bool owner : {true, false}) {
    for (const auto& topic : topics) {
      for (bool subscribe : {true, false}) {
        Fixture f;
        f.b.declare_domain("fpl");
        f.b.declare_topic({"qnh"});
        f.b.connect("fdps");
        f.b.connect("cwp1");
        f.b.register_owner("fdps", "fpl");
        const std::string client = owner ? "fdps" : "cwp1";
        bool expected = true;
        if (subscribe && topic == "fpl.contribution") expected = owner;
        if (!subscribe && (topic == "fpl.publication" || topic == "fpl.rejection")) expected = owner;
        const auto st = subscribe ? f.b.subscribe(client, topic, "sub") : f.publish(client, topic);
        CAPTURE(client);
        CAPTURE(topic);
        CAPTURE(subscribe);
        CHECK(st.ok() == expected);
        if (!expected) CHECK(st.code() == ErrorCode::ownership_violation);
        ++checked;
      }
    }
  }
  CHECK(checked == 16);
}

TEST_CASE("dispatch fanout, drop and order") {
  Fixture f;
  f.b.declare_topic({"qnh"});
  f.b.connect("src");
  f.publish("src", "qnh");
  CHECK(f.b.dispatch(f.now).empty());
  CHECK(f.b.stats("qnh").dropped == 1);
  CHECK(f.b.stats("qnh.dlq").published == 0);

  for (const char* c : {"a", "b", "c"}) {
    f.b.connect(c);
    f.b.subscribe(c, "qnh", std::string("s") + c);
  }
  f.publish("src", "qnh");
  const auto d = f.b.dispatch(f.now);
  CHECK(d.size() == 3);
  CHECK(f.b.pending_count() == 3);
  CHECK(d[0].deadline_ms == f.now + kDefaultAckDeadlineMs);
  CHECK(f.b.stats("qnh").published == 2);
  CHECK(f.b.stats("qnh").delivered == 3);

  f.publish("src", "qnh");
  f.publish("src", "qnh");
  const auto two = f.b.dispatch(f.now);
  std::map<std::string, std::vector<std::string>> per_sub;
  for (const auto& x : two) per_sub[x.subscription_id].push_back(x.envelope.message_id);
  for (const auto& [sub, ids] : per_sub) CHECK(ids == std::vector<std::string>{"src:3", "src:4"});
}

TEST_CASE("ack") {
  Fixture f;
  f.b.declare_topic({"qnh"});
  f.b.connect("src");
  f.b.connect("a");
  f.b.subscribe("a", "qnh", "s");
  f.publish("src", "qnh");
  f.b.dispatch(f.now);
  CHECK(f.b.ack("a", "wrong", "src:1").code() == ErrorCode::unknown_pending);
  CHECK(f.b.ack("a", "s", "src:1"));
  CHECK(f.b.ack("a", "s", "src:1").code() == ErrorCode::unknown_pending);
  CHECK(f.b.pending_count() == 0);
  CHECK(f.b.stats("qnh").acked == 1);
}

TEST_CASE("sweep_deadlines") {
  Fixture f;
  f.b.declare_topic({"qnh"});
  f.b.connect("src");
  f.b.connect("a");
  f.b.connect("b");
  f.b.subscribe("a", "qnh", "sa");
  f.b.subscribe("b", "qnh", "sb");
  f.publish("src", "qnh");
  f.b.dispatch(f.now);
  f.b.ack("b", "sb", "src:1");
  CHECK(f.b.sweep_deadlines(f.now + kDefaultAckDeadlineMs).empty());
  auto dead = f.b.sweep_deadlines(f.now + kDefaultAckDeadlineMs + 1);
  REQUIRE(dead.size() == 1);
  CHECK(dead[0].failed_subscription_id == "sa");
  CHECK(dead[0].failed_client == "a");
  CHECK(dead[0].reason == DlqReason::ack_timeout);

  for (int i = 0; i < 3; ++i) f.publish("src", "qnh");
  f.b.dispatch(f.now);
  for (int i = 2; i <= 4; ++i) f.b.ack("b", "sb", "src:" + std::to_string(i));
  dead = f.b.sweep_deadlines(f.now + 10 * kDefaultAckDeadlineMs);
  REQUIRE(dead.size() == 3);
  CHECK(dead[0].original_message_id == "src:2");
  CHECK(dead[1].original_message_id == "src:3");
  CHECK(dead[2].original_message_id == "src:4");
  CHECK(f.b.sweep_deadlines(f.now + 20 * kDefaultAckDeadlineMs).empty());
  CHECK(f.b.ack("a", "sa", "src:2").code() == ErrorCode::unknown_pending);
}

TEST_CASE("disconnect dead-letters and releases ownership") {
  Fixture f;
  f.b.declare_domain("fpl");
  f.b.connect("fdps");
  f.b.connect("cwp1");
  f.b.register_owner("fdps", "fpl");
  f.b.subscribe("cwp1", "fpl.publication", "p");
  f.publish("fdps", "fpl.publication");
  f.b.dispatch(f.now);
  const auto dead = f.b.disconnect("cwp1");
  REQUIRE(dead.size() == 1);
  CHECK(dead[0].reason == DlqReason::client_disconnected);
  CHECK(f.b.disconnect("cwp1").empty());
  f.b.disconnect("fdps");
  CHECK_FALSE(f.b.owner("fpl").has_value());
  CHECK(f.b.connect("x"));
  CHECK(f.b.connect("x").code() == ErrorCode::duplicate_client);
}

TEST_CASE("publish never waits on subscribers") {
  Fixture f;
  f.b.declare_topic({"qnh"});
  f.b.connect("src");
  f.b.connect("silent");
  f.b.subscribe("silent", "qnh", "s");
  for (int i = 0; i < 1000; ++i) REQUIRE(f.publish("src", "qnh"));
  CHECK(f.b.queued_count() == 1000);
  CHECK(f.b.dispatch(f.now).size() == 1000);
  for (int i = 0; i < 10; ++i) REQUIRE(f.publish("src", "qnh"));
}

TEST_CASE("stats and list_topics") {
  Fixture f;
  CHECK(f.b.list_topics().empty());
  f.b.declare_topic({"qnh"});
  CHECK(f.b.list_topics().size() == 2);
  CHECK(f.b.totals() == TopicStats{});
}

TEST_CASE("dead-letter exactness against a replay model") {
  gen::Rng rng(21);
  for (int round = 0; round < 60; ++round) {
    Fixture f;
    f.b.declare_topic({"t", TopicKind::plain, TopicScope::global, 50});
    const std::vector<std::string> pubs{"p1", "p2"};
    std::vector<std::string> subs{"a", "b", "c"};
    for (const auto& p : pubs) f.b.connect(p);
    for (const auto& s : subs) {
      f.b.connect(s);
      f.b.subscribe(s, "t", "s" + s);
    }
    // model: (sub, message) -> deadline of a pending delivery
    std::map<std::pair<std::string, std::string>, std::int64_t> pending;
    std::set<std::pair<std::string, std::string>> queued;
    std::multiset<std::pair<std::string, std::string>> expected, actual;
    std::set<std::string> live(subs.begin(), subs.end());
    auto take = [&](const std::vector<DlqRecord>& recs) {
      for (const auto& r : recs) actual.insert({r.failed_subscription_id, r.original_message_id});
    };
    for (int step = 0; step < 200; ++step) {
      const auto op = gen::pick(rng, 0, 9);
      if (op < 3) {
        const auto& p = pubs[gen::pick(rng, 0, 1)];
        f.publish(p, "t");
        for (const auto& s : live) queued.insert({"s" + s, p + ":" + std::to_string(f.seq[p])});
      } else if (op < 5) {
        for (const auto& d : f.b.dispatch(f.now)) {
          if (d.envelope.topic != "t") continue;
          CHECK(queued.erase({d.subscription_id, d.envelope.message_id}) == 1);
          pending[{d.subscription_id, d.envelope.message_id}] = d.deadline_ms;
        }
      } else if (op < 8 && !pending.empty()) {
        auto it = pending.begin();
        std::advance(it, gen::pick(rng, 0, static_cast<std::int64_t>(pending.size()) - 1));
        const auto client = it->first.first.substr(1);
        CHECK(f.b.ack(client, it->first.first, it->first.second));
        pending.erase(it);
      } else if (op == 8) {
        f.now += gen::pick(rng, 0, 40);
        for (auto it = pending.begin(); it != pending.end();) {
          if (it->second < f.now) {
            expected.insert(it->first);
            it = pending.erase(it);
          } else {
            ++it;
          }
        }
        take(f.b.sweep_deadlines(f.now));
      } else if (live.size() > 1 && gen::coin(rng, 20)) {
        const auto victim = *live.begin();
        live.erase(victim);
        for (auto it = queued.begin(); it != queued.end();) {
          if (it->first == "s" + victim) {
            expected.insert(*it);
            it = queued.erase(it);
          } else {
            ++it;
          }
        }
        for (auto it = pending.begin(); it != pending.end();) {
          if (it->first.first == "s" + victim) {
            expected.insert(it->first);
            it = pending.erase(it);
          } else {
            ++it;
          }
        }
        take(f.b.disconnect(victim));
      }
    }
    if (actual != expected) {
      for (auto& [s, m] : actual) if (!expected.count({s, m})) MESSAGE("extra " << s << " " << m);
      for (auto& [s, m] : expected) if (!actual.count({s, m})) MESSAGE("missing " << s << " " << m);
    }
    CHECK(actual == expected);
    CHECK(std::set(actual.begin(), actual.end()).size() == actual.size());
  }
}

TEST_CASE("frontend answers with ERROR frames") {
  Broker b([] {
    BrokerOptions o;
    o.id = "central";
    return o;
  }());
  b.declare_domain("fpl");
  Frontend fe(b, "central");
  protocol::Frame connect;
  connect.command = protocol::Command::connect;
  connect.set("client-id", "cwp1");
  auto out = fe.handle(1, connect, 0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].frame.command == protocol::Command::connected);
  out = fe.handle(2, connect, 0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].frame.header("error-code") == std::optional<std::string_view>("duplicate-client"));
  CHECK(out[0].close);

  protocol::Frame sub;
  sub.command = protocol::Command::subscribe;
  sub.set("topic", "fpl.contribution").set("subscription-id", "x");
  out = fe.handle(1, sub, 0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].frame.header("error-code") == std::optional<std::string_view>("ownership-violation"));
  CHECK(out[0].frame.header("subscription-id") == std::optional<std::string_view>("x"));

  protocol::Frame ping;
  ping.command = protocol::Command::ping;
  ping.set("info", "topics");
  out = fe.handle(1, ping, 0);
  const auto topics = parse_topics_document(protocol::parse_document(out[0].frame.body));
  CHECK(topics.size() == b.list_topics().size());
}

TEST_CASE("broker config") {
  const auto doc = protocol::parse_document(
      "broker.id = \"central\"\nbroker.ack_deadline_ms = 500\n"
      "topics.0.name = \"selection\"\ntopics.0.scope = \"local\"\ndomains.0.name = \"fpl\"\n");
  const auto c = parse_broker_config(doc);
  CHECK(c.id == "central");
  CHECK(c.topics.at(0).scope == TopicScope::local);
  auto b = build_broker(c);
  CHECK(b->topic("fpl.publication")->ack_deadline_ms == 500);
  CHECK_THROWS_AS(parse_broker_config(protocol::parse_document("broker.idd = \"x\"\n")), ConfigError);
  CHECK_THROWS_AS(parse_broker_config(protocol::parse_document("topics.1.scope = \"local\"\nbroker.id = \"x\"\n")),
                  ConfigError);
}
