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

#include "acwp/federation/bridge.hpp"
#include "acwp/federation/routing.hpp"
#include "acwp/protocol/document.hpp"
#include "doctest.h"
#include "support/gen.hpp"

using namespace acwp;
using namespace acwp::federation;
using protocol::Envelope;
namespace gen = acwp::testing;

namespace {

Envelope msg(std::string topic, std::vector<std::string> trace) {
  Envelope e;
  e.topic = std::move(topic);
  e.sender_id = "fdps";
  e.message_id = "fdps:1";
  e.message_type = "fpl.record";
  e.timestamp_ms = 42;
  e.hop_trace = std::move(trace);
  e.payload = {{"callsign", protocol::Value::text("DLH123")}};
  return e;
}

RoutingError::Kind routing_error(std::string_view text, const std::set<std::string, std::less<>>& local = {}) {
  try {
    load_routing_rules(text, local);
  } catch (const RoutingError& e) {
    return e.kind();
  }
  FAIL("no RoutingError");
  return RoutingError::Kind::syntax;
}

}  // namespace

TEST_CASE("load_routing_rules examples") {
  const auto rules = load_routing_rules("route fpl.* both\n");
  REQUIRE(rules.rules().size() == 1);
  CHECK(rules.rules()[0] == RoutingRule{"fpl.*", Direction::both});
  CHECK(routing_error("route selection up\n", {"selection"}) == RoutingError::Kind::local_scope_rule);
  CHECK(load_routing_rules("").empty());
  CHECK(load_routing_rules("# nothing\n\n").empty());
  CHECK(routing_error("route fpl.* sideways\n") == RoutingError::Kind::syntax);
  CHECK(routing_error("forward fpl.* up\n") == RoutingError::Kind::syntax);
  CHECK(routing_error("route fpl.* up extra\n") == RoutingError::Kind::syntax);
  try {
    load_routing_rules("route a up\nroute b nowhere\n");
  } catch (const RoutingError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("rule matching") {
  RoutingRule prefix{"fpl.*", Direction::down};
  CHECK(prefix.matches("fpl.publication"));
  CHECK(prefix.matches("fpl.a.b"));
  CHECK_FALSE(prefix.matches("fpl"));
  CHECK_FALSE(prefix.matches("fplx.publication"));
  CHECK_FALSE(prefix.matches("fpl.publication.dlq"));
  CHECK(RoutingRule{"fpl.publication.dlq", Direction::up}.matches("fpl.publication.dlq"));
  CHECK(prefix.allows(Direction::down));
  CHECK_FALSE(prefix.allows(Direction::up));
}

TEST_CASE("should_forward examples") {
  const auto rules = load_routing_rules("route fpl.* down\nroute selection.* both\n", {"selection"});
  CHECK(should_forward(msg("fpl.publication", {"central"}), rules, "cwp2", Direction::down));
  CHECK_FALSE(should_forward(msg("fpl.publication", {"central", "cwp2"}), rules, "cwp2", Direction::down));
  CHECK_FALSE(should_forward(msg("selection", {"cwp1"}), rules, "central", Direction::up));
  CHECK_FALSE(should_forward(msg("fpl.publication", {"cwp1"}), rules, "central", Direction::up));
  CHECK_FALSE(should_forward(msg("_reply.cwp1", {"cwp1"}), load_routing_rules("route _reply.* both\n"), "central",
                             Direction::up));
}

TEST_CASE("bridge_forward examples") {
  auto up = bridge_forward(msg("fpl.contribution", {"cwp1"}), "central");
  CHECK(up.hop_trace == std::vector<std::string>{"cwp1", "central"});
  const auto original = msg("fpl.publication", {"central"});
  std::vector<Envelope> copies;
  for (const char* id : {"cwp1", "cwp2", "cwp3"}) copies.push_back(bridge_forward(original, id));
  CHECK(copies[0].hop_trace == std::vector<std::string>{"central", "cwp1"});
  CHECK(copies[2].hop_trace == std::vector<std::string>{"central", "cwp3"});
  for (auto c : copies) {
    CHECK(protocol::encode_document(c.payload) == protocol::encode_document(original.payload));
    c.hop_trace = original.hop_trace;
    CHECK(c == original);
  }
}

TEST_CASE("bridge core buffers while unreachable and overflows at the limit") {
  BridgeOptions o;
  o.local_id = "cwp1";
  o.central_id = "central";
  o.rules = load_routing_rules("route fpl.* both\n");
  o.buffer_limit = 2;
  BridgeCore core(o);
  CHECK(core.client_id() == "bridge-cwp1");
  auto r = core.on_message(Side::local, msg("fpl.contribution", {"cwp1"}));
  CHECK(r.outcome == BridgeCore::Outcome::forwarded);
  CHECK(r.forward->hop_trace.back() == "central");
  CHECK(core.on_message(Side::central, msg("fpl.publication", {"central", "cwp1"})).outcome ==
        BridgeCore::Outcome::not_routed);

  core.set_reachable(Side::central, false);
  auto a = msg("fpl.contribution", {"cwp1"});
  auto b = a;
  b.message_id = "fdps:2";
  auto c = a;
  c.message_id = "fdps:3";
  CHECK(core.on_message(Side::local, a).outcome == BridgeCore::Outcome::buffered);
  CHECK(core.on_message(Side::local, b).outcome == BridgeCore::Outcome::buffered);
  const auto over = core.on_message(Side::local, c);
  CHECK(over.outcome == BridgeCore::Outcome::overflow);
  CHECK_FALSE(over.ack());
  CHECK(core.buffered(Side::central) == 2);
  const auto flushed = core.set_reachable(Side::central, true);
  REQUIRE(flushed.size() == 2);
  CHECK(flushed[0].message_id == "fdps:1");
  CHECK(flushed[1].message_id == "fdps:2");
  CHECK(core.buffered(Side::central) == 0);
}

TEST_CASE("bridge subscriptions follow the rules") {
  BridgeOptions o;
  o.local_id = "cwp1";
  o.central_id = "central";
  o.rules = load_routing_rules("route fpl.contribution up\nroute fpl.publication down\n");
  BridgeCore core(o);
  std::vector<broker::TopicInfo> topics;
  for (const char* t : {"fpl.contribution", "fpl.publication", "selection"}) {
    broker::TopicInfo info;
    info.descriptor.name = t;
    topics.push_back(info);
  }
  topics[2].descriptor.scope = broker::TopicScope::local;
  CHECK(core.subscriptions_for(Side::local, topics) == std::vector<std::string>{"fpl.contribution"});
  CHECK(core.subscriptions_for(Side::central, topics) == std::vector<std::string>{"fpl.publication"});
}

TEST_CASE("federation attach and detach") {
  Federation f("central");
  CHECK(f.attach("cwp1"));
  CHECK(f.attach("cwp4"));
  CHECK(f.attach("central").code() == ErrorCode::duplicate_broker);
  CHECK(f.attach("cwp1").code() == ErrorCode::duplicate_broker);
  CHECK(f.detach("cwp4"));
  CHECK_FALSE(f.detach("cwp4"));
  CHECK(f.locals() == std::vector<std::string>{"cwp1"});
  CHECK(f.attach("cwp4"));
}

TEST_CASE("forwarding never repeats a broker id") {
  gen::Rng rng(31);
  const std::vector<std::string> ids{"central", "cwp1", "cwp2", "cwp3"};
  const auto rules = load_routing_rules("route t.* both\n");
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> trace{ids[gen::pick(rng, 0, 3)]};
    auto e = msg("t.x", trace);
    for (int hop = 0; hop < 6; ++hop) {
      const auto& dest = ids[gen::pick(rng, 0, 3)];
      const auto dir = dest == "central" ? Direction::up : Direction::down;
      if (should_forward(e, rules, dest, dir)) e = bridge_forward(e, dest);
    }
    CHECK(protocol::check_envelope(e).empty());
  }
}
