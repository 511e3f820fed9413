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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "acwp/broker/broker.hpp"
#include "acwp/cli/cli.hpp"
#include "acwp/protocol/document.hpp"
#include "acwp/protocol/envelope.hpp"
#include "acwp/protocol/frame.hpp"
#include "acwp/protocol/schema.hpp"
#include "acwp/sim/scenario.hpp"
#include "acwp/sim/world.hpp"
#include "acwp/util/files.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

using namespace acwp;
namespace fs = std::filesystem;
namespace gen = acwp::testing;
using protocol::Document;
using protocol::Value;
using sim::Event;

namespace {

const fs::path kSource = ACWP_SOURCE_DIR;
const fs::path kGolden = ACWP_GOLDEN_DIR;
const fs::path kBinary = ACWP_BINARY;

/// Collects the first few failure descriptions of one criterion.
struct Verdict {
  std::size_t failures = 0;
  std::vector<std::string> notes;
  std::string summary;

  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures <= 5) notes.push_back(what);
  }
};

sim::WorldConfig demo_config() { return sim::load_world_config(kSource / "config" / "world.cfg"); }

sim::Scenario scenario_file(const std::string& name) {
  return sim::parse_scenario(util::read_file(kSource / "config" / "scenarios" / name));
}

std::string corr_of(const Event& e) { return gen::detail_field(e.detail, "corr"); }

std::vector<std::string> hops_of(const Event& e) { return gen::split(gen::detail_field(e.detail, "hops"), ','); }

bool is_cwp_subscription(const Event& e) { return e.kind == "deliver" && e.client == e.broker; }

// ---------------------------------------------------------------------------

void contribution_flow(Verdict& v) {
  auto w = sim::build_world(demo_config());
  sim::run_scenario(*w, scenario_file("contribution.scn"));
  const auto& ev = w->log().events();
  auto find = [&](std::size_t from, const std::function<bool(const Event&)>& pred) {
    for (std::size_t i = from; i < ev.size(); ++i) {
      if (pred(ev[i])) return i;
    }
    return ev.size();
  };
  const auto contributed = find(0, [](const Event& e) { return e.kind == "contribute" && e.client == "cwp1"; });
  v.check(contributed < ev.size(), "no contribution from cwp1");
  if (contributed == ev.size()) return;
  const auto corr = ev[contributed].message_id;
  const auto accepted = find(contributed, [&](const Event& e) {
    return e.kind == "accept" && e.broker == "central" && e.message_id == corr;
  });
  const auto processed = find(accepted, [&](const Event& e) { return e.kind == "owner_recv" && e.message_id == corr; });
  const auto published = find(processed, [&](const Event& e) {
    return e.kind == "accept" && e.broker == "central" && e.topic == "fpl.publication" && corr_of(e) == corr;
  });
  v.check(accepted < ev.size(), "central never accepted " + corr);
  v.check(processed < ev.size(), "owner never processed " + corr);
  v.check(published < ev.size(), "no publication correlated with " + corr);
  if (published == ev.size()) return;
  const auto pub_id = ev[published].message_id;
  std::size_t applied = 0;
  for (const auto& cwp : w->cwp_ids()) {
    const auto at = find(published, [&](const Event& e) {
      return e.kind == "apply" && e.client == cwp && e.message_id == pub_id && corr_of(e) == corr;
    });
    v.check(at < ev.size(), cwp + " did not apply " + pub_id + " after it was published");
    if (at < ev.size()) ++applied;
  }
  v.check(applied == 3 && w->cwp_ids().size() == 3, "expected delivery at all three positions");
  v.check(static_cast<bool>(sim::assert_converged(*w, "fpl")), "replicas diverged");
  v.summary = corr + " -> " + pub_id + " applied at " + std::to_string(applied) + " positions";
}

// ---------------------------------------------------------------------------

void acl_table(Verdict& v) {
  const std::vector<std::string> topics{"fpl.contribution", "fpl.publication", "fpl.rejection", "qnh"};
  int cells = 0;
  for (bool owner : {true, false}) {
    for (const auto& topic : topics) {
      for (bool subscribe : {true, false}) {
        broker::BrokerOptions o;
        o.id = "central";
        o.clock = [] { return std::int64_t{0}; };
        broker::Broker b(o);
        b.declare_domain("fpl");
        b.declare_topic({"qnh"});
        b.connect("fdps");
        b.connect("cwp1");
        b.register_owner("fdps", "fpl");
        const std::string client = owner ? "fdps" : "cwp1";
        bool expected = true;
        if (subscribe && topic == "fpl.contribution") expected = owner;
        if (!subscribe && (topic == "fpl.publication" || topic == "fpl.rejection")) expected = owner;
        Status st;
        if (subscribe) {
          st = b.subscribe(client, topic, "sub");
        } else {
          protocol::Envelope e;
          e.topic = topic;
          e.sender_id = client;
          e.message_id = protocol::make_message_id(client, 1);
          e.message_type = "any";
          st = b.publish(client, e);
        }
        const std::string cell = client + " " + (subscribe ? "subscribe " : "publish ") + topic;
        v.check(st.ok() == expected, cell + ": got " + st.to_string());
        if (!expected) v.check(st.code() == ErrorCode::ownership_violation, cell + ": wrong code " + st.to_string());
        ++cells;
      }
    }
  }
  v.summary = std::to_string(cells) + " cells";
}

// ---------------------------------------------------------------------------

/// Every contribution gets exactly one authoritative answer at the central broker.
void check_rejection_completeness(Verdict& v, const sim::EventLog& log, const std::string& run) {
  std::map<std::string, int> answers;
  for (const auto& e : log.events()) {
    if (e.kind == "accept" && e.broker == "central" && (e.topic == "fpl.publication" || e.topic == "fpl.rejection")) {
      ++answers[corr_of(e)];
    }
  }
  for (const auto& e : log.of_kind("contribute")) {
    v.check(answers[e.message_id] == 1,
            run + ": " + e.message_id + " answered " + std::to_string(answers[e.message_id]) + " times");
  }
}

void convergence(Verdict& v) {
  gen::Rng rng(3001);
  std::size_t contributions = 0;
  for (int run = 0; run < 200; ++run) {
    const auto cfg = gen::random_world(rng);
    const auto script = gen::random_contributions(rng, cfg);
    auto w = sim::build_world(cfg);
    sim::run_scenario(*w, script);
    const auto name = "run " + std::to_string(run) + " seed " + std::to_string(cfg.seed);
    v.check(w->pending_events() == 0, name + ": not quiescent");
    const auto report = sim::assert_converged(*w, "fpl");
    v.check(report.ok, name + ": " + (report.diffs.empty() ? "diverged" : report.diffs.front()));
    v.check(w->log().of_kind("contribute").size() == script.actions.size(), name + ": contributions lost");
    check_rejection_completeness(v, w->log(), name);
    contributions += script.actions.size();
  }
  v.summary = "200 runs, " + std::to_string(contributions) + " contributions";
}

// ---------------------------------------------------------------------------

void dead_letters(Verdict& v) {
  gen::Rng rng(4001);
  std::size_t expired = 0;
  std::size_t controls = 0;
  for (int run = 0; run < 60; ++run) {
    auto cfg = gen::random_world(rng);
    if (cfg.locals.size() < 2) cfg.locals.push_back("cwp" + std::to_string(cfg.locals.size() + 1));
    cfg.ack_deadline_ms = gen::pick(rng, 100, 2000);
    auto script = gen::random_contributions(rng, cfg, 40);
    const auto name = "run " + std::to_string(run);

    // Control: no withholding, no dead letters.
    {
      auto w = sim::build_world(cfg);
      sim::run_scenario(*w, script);
      v.check(w->log().of_kind("dead_letter").empty(), name + ": dead letters without withholding");
      ++controls;
    }

    std::set<std::string> withheld;
    for (const auto& id : cfg.locals) {
      if (withheld.size() + 1 < cfg.locals.size() && gen::coin(rng)) withheld.insert(id);
    }
    if (withheld.empty()) withheld.insert(cfg.locals.front());
    const std::int64_t end = script.actions.back().at_ms;
    for (const auto& id : withheld) {
      sim::Action on;
      on.at_ms = gen::pick(rng, 0, end);
      on.actor = id;
      on.kind = sim::ActionKind::withhold_ack;
      on.args = {"fpl.publication"};
      script.actions.push_back(on);
      if (gen::coin(rng)) {
        sim::Action off = on;
        off.at_ms = on.at_ms + gen::pick(rng, 0, end + 50);
        off.args.push_back("off");
        script.actions.push_back(off);
      }
    }
    std::stable_sort(script.actions.begin(), script.actions.end(),
                     [](const auto& a, const auto& b) { return a.at_ms < b.at_ms; });

    auto w = sim::build_world(cfg);
    sim::run_scenario(*w, script);

    // Oracle: replay the log; a publication handled while its position
    // withholds acks must expire exactly once, anything else must be acked.
    std::set<std::string> holding;
    std::map<std::pair<std::string, std::string>, int> expected;  // (message, cwp)
    std::map<std::pair<std::string, std::string>, int> acked;
    std::map<std::pair<std::string, std::string>, int> lettered;
    std::map<std::pair<std::string, std::string>, int> recovered;
    for (const auto& e : w->log().events()) {
      if (e.kind == "withhold_ack") {
        if (e.detail == "off") {
          holding.erase(e.client);
        } else {
          holding.insert(e.client);
        }
      } else if ((e.kind == "apply" || e.kind == "stale") && e.topic == "fpl.publication") {
        if (holding.count(e.client)) ++expected[{e.message_id, e.client}];
      } else if (e.kind == "ack" && withheld.count(e.client) && e.broker == e.client) {
        ++acked[{e.message_id, e.client}];
      } else if (e.kind == "dead_letter") {
        v.check(gen::split(e.detail, ' ').front() == "ack_timeout", name + ": reason " + e.detail);
        ++lettered[{e.message_id, e.client}];
      } else if (e.kind == "recovered") {
        ++recovered[{e.message_id, e.client}];
      }
    }
    v.check(lettered == expected, name + ": " + std::to_string(lettered.size()) + " dead letters, expected " +
                                      std::to_string(expected.size()));
    v.check(recovered == lettered, name + ": recovery saw " + std::to_string(recovered.size()) + " records");
    for (const auto& [key, n] : lettered) {
      v.check(n == 1, name + ": " + key.first + " dead-lettered " + std::to_string(n) + " times");
      v.check(acked.count(key) == 0, name + ": " + key.first + " both acked and dead-lettered");
    }
    expired += lettered.size();

    // Healthy positions are unaffected.
    for (const auto& id : cfg.locals) {
      if (withheld.count(id)) continue;
      v.check(w->replica(id).plans == w->owner_state().plans, name + ": healthy " + id + " diverged");
    }
    for (const auto& e : w->log().of_kind("dead_letter")) {
      v.check(withheld.count(e.client) == 1, name + ": healthy " + e.client + " dead-lettered " + e.message_id);
    }
  }
  v.summary = "60 runs, " + std::to_string(expired) + " expired deliveries, " + std::to_string(controls) +
              " clean controls";
}

// ---------------------------------------------------------------------------

void federation_props(Verdict& v) {
  gen::Rng rng(5001);
  std::size_t accepts = 0;
  std::size_t deliveries = 0;
  for (int run = 0; run < 200; ++run) {
    auto cfg = gen::random_world(rng);
    const bool flood = run % 2 == 1;
    if (flood) cfg.routes = {"fpl.* both", "met.* both"};
    auto script = gen::random_contributions(rng, cfg, 40);
    const auto end = script.actions.back().at_ms;
    for (int i = 0; i < 3; ++i) {
      sim::Action a;
      a.at_ms = gen::pick(rng, 0, end);
      a.actor = cfg.locals[gen::pick(rng, 0, static_cast<std::int64_t>(cfg.locals.size()) - 1)];
      a.kind = sim::ActionKind::select;
      a.args = {gen::callsign_pool()[gen::pick(rng, 0, 5)]};
      script.actions.push_back(a);
    }
    std::stable_sort(script.actions.begin(), script.actions.end(),
                     [](const auto& a, const auto& b) { return a.at_ms < b.at_ms; });
    auto w = sim::build_world(cfg);
    sim::run_scenario(*w, script);
    const auto name = std::string(flood ? "flooded " : "") + "run " + std::to_string(run);

    std::map<std::pair<std::string, std::string>, int> accepted;  // (broker, message)
    std::map<std::pair<std::string, std::string>, int> delivered;  // (message, cwp)
    std::vector<std::string> publications;
    for (const auto& e : w->log().events()) {
      if (e.kind == "accept") {
        ++accepts;
        const auto hops = hops_of(e);
        const std::set<std::string> unique(hops.begin(), hops.end());
        v.check(unique.size() == hops.size(), name + ": repeated hop in " + e.detail);
        v.check(!hops.empty() && hops.back() == e.broker, name + ": trace does not end at " + e.broker);
        ++accepted[{e.broker, e.message_id}];
        if (e.broker == "central" && e.topic == "fpl.publication") publications.push_back(e.message_id);
      }
      if (is_cwp_subscription(e) && e.topic == "fpl.publication") ++delivered[{e.message_id, e.client}];
      if (e.topic == "selection") {
        v.check(e.broker != "central" && e.kind != "forward", name + ": selection left its broker: " + e.kind);
        if (!e.message_id.empty()) {
          v.check(gen::split_message_id(e.message_id).first == e.broker,
                  name + ": foreign selection " + e.message_id + " at " + e.broker);
        }
      }
    }
    for (const auto& [key, n] : accepted) {
      v.check(n == 1, name + ": " + key.second + " accepted " + std::to_string(n) + " times at " + key.first);
    }
    for (const auto& m : publications) {
      for (const auto& id : cfg.locals) {
        v.check(delivered[{m, id}] == 1, name + ": " + m + " delivered " + std::to_string(delivered[{m, id}]) +
                                             " times to " + id);
        ++deliveries;
      }
    }
    v.check(sim::assert_converged(*w, "fpl").ok, name + ": diverged");
  }

  // Hot attach: central components are neither reconnected nor resubscribed.
  auto w = sim::build_world(demo_config());
  const auto setup = w->log().size();
  sim::run_scenario(*w, scenario_file("hot_attach.scn"));
  const std::set<std::string> setup_kinds{"connected", "subscribed", "owned", "broker_up", "disconnect"};
  const std::set<std::string> server_side{"fdps", "recovery", "metsrc", "legacy"};
  auto server_component = [&](const Event& e) {
    return server_side.count(e.client) == 1 || (e.broker == "central" && !e.client.starts_with("bridge-"));
  };
  bool attached = false;
  std::string last_fdps;
  for (std::size_t i = setup; i < w->log().size(); ++i) {
    const auto& e = w->log().events()[i];
    if (e.kind == "broker_up" && e.broker == "cwp4") attached = true;
    v.check(!(setup_kinds.count(e.kind) && server_component(e)),
            "hot attach touched " + e.client + "@" + e.broker + " (" + e.kind + ")");
    if (e.kind == "accept" && e.broker == "central" && e.topic == "fpl.publication") last_fdps = e.message_id;
  }
  v.check(attached, "cwp4 never came up");
  bool reached = false;
  for (const auto& e : w->log().events()) {
    if (e.kind == "apply" && e.client == "cwp4" && e.message_id == last_fdps) reached = true;
  }
  v.check(reached, "the publication after attach did not reach cwp4");
  v.check(w->federation().locals().size() == 4, "federation does not list cwp4");
  v.check(sim::assert_converged(*w, "fpl").ok, "hot attach diverged");
  v.summary = "200 runs, " + std::to_string(accepts) + " hop traces, " + std::to_string(deliveries) +
              " exactly-once deliveries, hot attach ok";
}

// ---------------------------------------------------------------------------

void ordering(Verdict& v) {
  gen::Rng rng(6001);
  std::size_t streams = 0;
  for (int run = 0; run < 200; ++run) {
    auto cfg = gen::random_world(rng);
    cfg.net.jitter_ms = gen::pick(rng, 5, 25);
    auto script = gen::random_contributions(rng, cfg, 60);
    const auto end = script.actions.back().at_ms;
    // A late subscriber sees a suffix of the publication sequence.
    sim::Action late;
    late.at_ms = gen::pick(rng, 0, end);
    late.actor = cfg.locals[gen::pick(rng, 0, static_cast<std::int64_t>(cfg.locals.size()) - 1)];
    late.kind = sim::ActionKind::subscribe;
    late.args = {"fpl.publication"};
    script.actions.push_back(late);
    std::stable_sort(script.actions.begin(), script.actions.end(),
                     [](const auto& a, const auto& b) { return a.at_ms < b.at_ms; });
    auto w = sim::build_world(cfg);
    sim::run_scenario(*w, script);
    const auto name = "run " + std::to_string(run);

    std::vector<std::string> published;
    std::map<std::tuple<std::string, std::string, std::string>, std::uint64_t> last;  // broker, sub, sender
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> seen;     // broker, sub
    for (const auto& e : w->log().events()) {
      if (e.kind == "accept" && e.broker == "central" && e.topic == "fpl.publication") published.push_back(e.message_id);
      if (e.kind != "deliver") continue;
      const auto [sender, seq] = gen::split_message_id(e.message_id);
      auto& prev = last[{e.broker, e.detail, sender}];
      v.check(seq > prev, name + ": " + e.message_id + " after " + sender + ":" + std::to_string(prev) + " on " +
                              e.broker + "/" + e.detail);
      prev = seq;
      if (e.topic == "fpl.publication") seen[{e.broker, e.detail}].push_back(e.message_id);
    }
    for (const auto& [key, got] : seen) {
      ++streams;
      const bool cwp = key.first == gen::split(key.second, '.').front();
      if (!cwp) continue;
      const bool suffix = got.size() <= published.size() &&
                          std::equal(got.begin(), got.end(), published.end() - static_cast<long>(got.size()));
      v.check(suffix, name + ": " + key.second + " saw a sequence that is not a suffix of the owner's");
    }
    for (const auto& id : cfg.locals) {
      const auto it = seen.find({id, id + ".s1"});
      const auto got = it == seen.end() ? std::vector<std::string>{} : it->second;
      v.check(got == published, name + ": " + id + " missed publications");
    }
  }
  v.summary = "200 runs, " + std::to_string(streams) + " publication streams";
}

// ---------------------------------------------------------------------------

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void schema_fuzz(Verdict& v, gen::Rng& rng, std::size_t& injected) {
  struct Field {
    std::string path;
    std::string kind;
    bool required;
    std::string constraint;  // enum | min | max | pattern | empty
  };
  const std::vector<std::string> kinds{"string", "int", "decimal", "bool"};
  const std::vector<std::string> words{"alpha", "bravo", "charlie", "delta"};
  for (int s = 0; s < 200; ++s) {
    std::vector<Field> fields;
    std::string text = "message t.x v1\n";
    std::set<std::string> used;
    const auto n = gen::pick(rng, 1, 8);
    for (std::int64_t i = 0; i < n; ++i) {
      Field f;
      do f.path = gen::identifier(rng) + (gen::coin(rng, 20) ? "." + gen::identifier(rng) : "");
      while (!used.insert(f.path).second || used.count(gen::split(f.path, '.').front()) > 1);
      f.kind = kinds[gen::pick(rng, 0, 3)];
      f.required = gen::coin(rng, 60);
      text += "field " + f.path + " " + f.kind + (f.required ? " required" : " optional");
      if (f.kind == "string") {
        switch (gen::pick(rng, 0, 2)) {
          case 0: f.constraint = "enum"; text += " enum(alpha|bravo|charlie|delta)"; break;
          case 1: f.constraint = "pattern"; text += " pattern=/[A-Z]{3}/"; break;
          default: break;
        }
      } else if (f.kind != "bool" && gen::coin(rng, 70)) {
        f.constraint = gen::coin(rng) ? "min" : "max";
        text += " min=-50 max=50";
      }
      text += "\n";
      fields.push_back(f);
    }
    const auto set = protocol::parse_schema_set(text);

    auto valid_value = [&](const Field& f) {
      if (f.kind == "bool") return Value::boolean(gen::coin(rng));
      if (f.kind == "int") return Value::integer(gen::pick(rng, -50, 50));
      if (f.kind == "decimal") return Value::decimal(protocol::Decimal(gen::pick(rng, -500, 500), -1));
      if (f.constraint == "enum") return Value::text(words[gen::pick(rng, 0, 3)]);
      if (f.constraint == "pattern") {
        std::string t;
        for (int i = 0; i < 3; ++i) t += static_cast<char>('A' + gen::pick(rng, 0, 25));
        return Value::text(t);
      }
      return Value::text(gen::text(rng));
    };
    Document base;
    for (const auto& f : fields) {
      if (f.required || gen::coin(rng)) base.set(f.path, valid_value(f));
    }
    v.check(protocol::validate(base, "t.x", set).empty(), "generated document is invalid for\n" + text);

    for (int m = 0; m < 25; ++m) {
      Document d = base;
      const auto& f = fields[gen::pick(rng, 0, static_cast<std::int64_t>(fields.size()) - 1)];
      protocol::Violation want{protocol::ViolationKind::wrong_kind, f.path, ""};
      const auto mode = gen::pick(rng, 0, 2);
      if (mode == 0 && f.required) {
        d.erase(f.path);
        want.kind = protocol::ViolationKind::missing_required;
      } else if (mode == 1 && !f.constraint.empty()) {
        want.kind = protocol::ViolationKind::constraint_failed;
        want.constraint = f.constraint;
        if (f.constraint == "enum") d.set(f.path, Value::text("zulu"));
        if (f.constraint == "pattern") d.set(f.path, Value::text(lower(valid_value(f).as_text())));
        if (f.constraint == "min" || f.constraint == "max") {
          const auto out = f.constraint == "min" ? -gen::pick(rng, 51, 10000) : gen::pick(rng, 51, 10000);
          d.set(f.path, f.kind == "int" ? Value::integer(out) : Value::decimal(protocol::Decimal(out * 10 - 1, -1)));
        }
      } else {
        if (f.kind == "string") {
          d.set(f.path, gen::coin(rng) ? Value::integer(7) : Value::boolean(true));
        } else if (f.kind == "bool") {
          d.set(f.path, Value::text("true"));
        } else if (f.kind == "int") {
          d.set(f.path, gen::coin(rng) ? Value::decimal(protocol::Decimal(15, -1)) : Value::text("12"));
        } else {
          d.set(f.path, gen::coin(rng) ? Value::text("1.5") : Value::boolean(false));
        }
      }
      ++injected;
      const auto found = protocol::validate(d, "t.x", set);
      const bool detected = std::find(found.begin(), found.end(), want) != found.end();
      v.check(detected, "missed " + want.to_string() + " in\n" + protocol::encode_document(d) + "schema:\n" + text);
      v.check(found.size() == 1, "extra violations for " + want.to_string());
    }
  }
}

void codec(Verdict& v) {
  gen::Rng rng(7001);
  for (int i = 0; i < 10000; ++i) {
    const auto d = gen::document(rng);
    const auto bytes = protocol::encode_document(d);
    const auto back = protocol::parse_document(bytes);
    v.check(back == d && protocol::encode_document(back) == bytes, "document round trip failed:\n" + bytes);
  }
  // Frames go through the incremental decoder in random chunk sizes.
  std::vector<protocol::Frame> frames;
  std::string stream;
  for (int i = 0; i < 10000; ++i) {
    frames.push_back(gen::frame(rng));
    stream += protocol::encode_frame(frames.back());
  }
  protocol::FrameDecoder decoder;
  std::vector<protocol::Frame> decoded;
  for (std::size_t pos = 0; pos < stream.size();) {
    const auto len = std::min<std::size_t>(stream.size() - pos, gen::pick(rng, 1, 600));
    decoder.feed(std::string_view(stream).substr(pos, len));
    pos += len;
    while (auto f = decoder.next()) decoded.push_back(std::move(*f));
  }
  decoder.finish();
  v.check(decoded == frames, "frame stream round trip failed");
  std::size_t injected = 0;
  schema_fuzz(v, rng, injected);
  v.summary = "10000 documents, 10000 frames, " + std::to_string(injected) + " injected violations";
}

// ---------------------------------------------------------------------------

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  std::istringstream in;
  const int code = cli::run_cli(args, o, e, in);
  if (out) *out = o.str();
  return code;
}

void determinism(Verdict& v) {
  const auto dir = fs::temp_directory_path() / ("acwp-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(kGolden)) {
    if (entry.path().extension() != ".log") continue;
    const auto name = entry.path().stem().string();
    const auto scn = kSource / "config" / "scenarios" / (name + ".scn");
    const auto a = dir / (name + ".a.log");
    const auto b = dir / (name + ".b.log");
    const auto world = (kSource / "config" / "world.cfg").string();
    v.check(cli({"sim", "run", world, scn.string(), "--seed", "42", "--out", a.string()}) == 0, name + ": a failed");
    v.check(cli({"sim", "run", world, scn.string(), "--seed", "42", "--out", b.string()}) == 0, name + ": b failed");
    const auto golden = util::read_file(entry.path());
    v.check(util::read_file(a) == golden, name + ": first run differs from the golden log");
    v.check(util::read_file(b) == golden, name + ": second run differs from the golden log");
    ++files;
  }
  fs::remove_all(dir);
  v.check(files >= 7, "only " + std::to_string(files) + " golden logs found");
  v.summary = std::to_string(files) + " golden scenarios, byte-identical";
}

// ---------------------------------------------------------------------------

void owner_oracle(Verdict& v) {
  gen::Rng rng(9001);
  std::size_t replayed = 0;
  for (int run = 0; run < 100; ++run) {
    const auto cfg = gen::random_world(rng);
    const auto script = gen::random_contributions(rng, cfg);
    auto w = sim::build_world(cfg);
    sim::run_scenario(*w, script);
    const auto name = "run " + std::to_string(run);

    std::map<std::string, const sim::Action*> by_id;
    const auto contributed = w->log().of_kind("contribute");
    v.check(contributed.size() == script.actions.size(), name + ": contribute count");
    for (std::size_t i = 0; i < contributed.size() && i < script.actions.size(); ++i) {
      v.check(contributed[i].detail == script.actions[i].args[0], name + ": contribution order");
      by_id[contributed[i].message_id] = &script.actions[i];
    }
    gen::ReferenceFplReducer reducer;
    for (const auto& e : w->log().of_kind("owner_recv")) {
      const auto it = by_id.find(e.message_id);
      v.check(it != by_id.end(), name + ": unknown contribution " + e.message_id);
      if (it == by_id.end()) continue;
      reducer.apply(it->second->args[0], it->second->payload);
      ++replayed;
    }
    v.check(reducer.plans() == w->owner_state().plans, name + ": owner state differs from the reference reducer");
  }
  v.summary = "100 sequences, " + std::to_string(replayed) + " contributions replayed";
}

// ---------------------------------------------------------------------------

/// A child process with its stdout and stderr on pipes.
class Child {
 public:
  explicit Child(const std::vector<std::string>& args) {
    int out[2], err[2];
    if (::pipe(out) != 0 || ::pipe(err) != 0) throw std::runtime_error("pipe failed");
    pid_ = ::fork();
    if (pid_ == 0) {
      ::dup2(out[1], 1);
      ::dup2(err[1], 2);
      ::close(out[0]);
      ::close(err[0]);
      std::vector<char*> argv;
      for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      ::execv(argv[0], argv.data());
      ::_exit(127);
    }
    ::close(out[1]);
    ::close(err[1]);
    fd_[0] = out[0];
    fd_[1] = err[0];
  }
  ~Child() {
    if (pid_ > 0 && !exited_) {
      ::kill(pid_, SIGTERM);
      ::waitpid(pid_, nullptr, 0);
    }
    ::close(fd_[0]);
    ::close(fd_[1]);
  }
  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  /// Reads until `needle` appears on stdout (0) or stderr (1), or the deadline passes.
  bool wait_for(int stream, const std::string& needle, std::chrono::steady_clock::time_point deadline) {
    while (text_[stream].find(needle) == std::string::npos) {
      if (!pump(deadline)) return false;
    }
    return true;
  }
  /// Reads until both streams close and returns the exit code, or -1 on timeout.
  int wait_exit(std::chrono::steady_clock::time_point deadline) {
    while (open_[0] || open_[1]) {
      if (!pump(deadline)) return -1;
    }
    int status = 0;
    ::waitpid(pid_, &status, 0);
    exited_ = true;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  const std::string& out() const { return text_[0]; }
  const std::string& err() const { return text_[1]; }

 private:
  bool pump(std::chrono::steady_clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0 || (!open_[0] && !open_[1])) return false;
    pollfd p[2] = {{open_[0] ? fd_[0] : -1, POLLIN, 0}, {open_[1] ? fd_[1] : -1, POLLIN, 0}};
    if (::poll(p, 2, static_cast<int>(left.count())) <= 0) return false;
    for (int i = 0; i < 2; ++i) {
      if (!(p[i].revents & (POLLIN | POLLHUP))) continue;
      char buf[4096];
      const auto n = ::read(fd_[i], buf, sizeof buf);
      if (n <= 0) {
        open_[i] = false;
      } else {
        text_[i].append(buf, static_cast<std::size_t>(n));
      }
    }
    return true;
  }

  pid_t pid_ = -1;
  int fd_[2] = {-1, -1};
  bool open_[2] = {true, true};
  bool exited_ = false;
  std::string text_[2];
};

std::string listening_endpoint(const Child& c) {
  const auto pos = c.out().find("listening ");
  if (pos == std::string::npos) return {};
  const auto end = c.out().find('\n', pos);
  return c.out().substr(pos + 10, end - pos - 10);
}

void live_smoke(Verdict& v) {
  using clock = std::chrono::steady_clock;
  const auto live = kSource / "config" / "live";
  const auto bin = kBinary.string();
  const auto setup_deadline = clock::now() + std::chrono::seconds(20);
  const auto dir = fs::temp_directory_path() / ("acwp-live-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  auto serve = [&](const std::string& cfg, const std::string& role) {
    return std::make_unique<Child>(std::vector<std::string>{
        bin, "broker", "serve", "--config", (live / cfg).string(), "--role", role, "--listen", "127.0.0.1:0"});
  };
  auto central = serve("central.cfg", "central");
  auto cwp1 = serve("cwp1.cfg", "local");
  auto cwp2 = serve("cwp2.cfg", "local");
  std::map<std::string, std::string> at;
  for (auto [name, child] : {std::pair{"central", central.get()}, {"cwp1", cwp1.get()}, {"cwp2", cwp2.get()}}) {
    v.check(child->wait_for(0, "\n", setup_deadline), std::string(name) + " did not start: " + child->err());
    at[name] = listening_endpoint(*child);
  }
  if (v.failures) return;

  std::vector<std::unique_ptr<Child>> bridges;
  for (const std::string local : {"cwp1", "cwp2"}) {
    const auto cfg = dir / ("bridge-" + local + ".cfg");
    std::ofstream(cfg) << "bridge.local = \"" << local << "\"\n"
                       << "bridge.local_endpoint = \"" << at[local] << "\"\n"
                       << "bridge.central = \"central\"\n"
                       << "bridge.central_endpoint = \"" << at["central"] << "\"\n"
                       << "bridge.rules = \"" << (live / "routes.rules").string() << "\"\n"
                       << "local_topics.0 = \"selection\"\n";
    bridges.push_back(std::make_unique<Child>(std::vector<std::string>{bin, "bridge", "run", "--config", cfg.string()}));
    v.check(bridges.back()->wait_for(0, "ready", setup_deadline), "bridge " + local + " failed: " + bridges.back()->err());
  }
  Child owner({bin, "demo", "owner", at["central"]});
  v.check(owner.wait_for(0, "ready", setup_deadline), "owner failed: " + owner.err());
  std::vector<std::unique_ptr<Child>> subs;
  for (const std::string local : {"cwp1", "cwp2"}) {
    subs.push_back(std::make_unique<Child>(std::vector<std::string>{
        bin, "sub", at[local], "fpl.publication", "--count", "1", "--timeout", "10000", "--client-id", local + "-view"}));
    v.check(subs.back()->wait_for(1, "subscribed", setup_deadline), local + " subscriber failed: " + subs.back()->err());
  }
  if (v.failures) {
    fs::remove_all(dir);
    return;
  }

  const auto start = clock::now();
  const auto deadline = start + std::chrono::seconds(5);
  Child pub({bin, "pub", at["cwp1"], "fpl.contribution", "fpl.create", (live / "dlh123.doc").string(), "--client-id",
             "cwp1"});
  v.check(pub.wait_exit(deadline) == 0, "pub failed: " + pub.err());
  const auto id = pub.out().substr(0, pub.out().find('\n'));
  std::size_t received = 0;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto code = subs[i]->wait_exit(deadline);
    v.check(code == 0, "subscriber " + std::to_string(i + 1) + " exit " + std::to_string(code) + ": " + subs[i]->err());
    if (code != 0) continue;
    try {
      const auto doc = protocol::parse_document(subs[i]->out());
      const auto* corr = doc.find("correlation_id");
      const auto* type = doc.find("message_type");
      const auto* cs = doc.find("payload.callsign");
      v.check(corr && corr->as_text() == id, "subscriber " + std::to_string(i + 1) + " got another correlation");
      v.check(type && type->as_text() == "fpl.record", "subscriber got a non-record");
      v.check(cs && cs->as_text() == "DLH123", "subscriber got another callsign");
      if (corr && corr->as_text() == id) ++received;
    } catch (const std::exception& e) {
      v.check(false, std::string("unparseable subscriber output: ") + e.what());
    }
  }
  const auto took = std::chrono::duration<double>(clock::now() - start).count();
  v.check(took < 5.0, "flow took " + std::to_string(took) + " s");
  fs::remove_all(dir);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", took);
  v.summary = id + " reached " + std::to_string(received) + " positions over TCP in " + buf + " s";
}

// ---------------------------------------------------------------------------

struct Criterion {
  int number;
  std::string name;
  double bound_s;
  std::function<void(Verdict&)> run;
};

}  // namespace

int main() {
  ::signal(SIGPIPE, SIG_IGN);
  const std::vector<Criterion> criteria{
      {1, "contribution causal flow", 1.0, contribution_flow},
      {2, "ownership ACL table", 1.0, acl_table},
      {3, "convergence and rejection completeness", 60.0, convergence},
      {4, "dead-letter exactness", 5.0, dead_letters},
      {5, "federation loop freedom, exactly-once, isolation, hot attach", 30.0, federation_props},
      {6, "per-publisher FIFO and identical publication order", 30.0, ordering},
      {7, "codec round trips and schema mutation fuzz", 30.0, codec},
      {8, "deterministic golden logs", 60.0, determinism},
      {9, "owner matches the reference reducer", 10.0, owner_oracle},
      {10, "live smoke over TCP", 5.0, live_smoke},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // The live criterion times only the flow itself; process startup is excluded.
    const bool in_time = c.number == 10 || took < c.bound_s;
    const bool pass = v.failures == 0 && in_time;
    if (!pass) ++failed;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs/%.0fs", took, c.bound_s);
    std::cout << (pass ? "PASS" : "FAIL") << " " << c.number << " " << c.name << " [" << timing << "] " << v.summary
              << "\n";
    for (const auto& n : v.notes) std::cout << "    " << n << "\n";
    if (v.failures > v.notes.size()) std::cout << "    ... " << v.failures - v.notes.size() << " more\n";
    if (!in_time) std::cout << "    over the time bound\n";
    std::cout.flush();
  }
  return failed == 0 ? 0 : 1;
}
