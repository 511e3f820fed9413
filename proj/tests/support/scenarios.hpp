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

#pragma once

#include <string>
#include <vector>

#include "acwp/sim/scenario.hpp"
#include "acwp/sim/world.hpp"
#include "gen.hpp"

namespace acwp::testing {

inline const std::vector<std::string>& callsign_pool() {
  static const std::vector<std::string> pool{"DLH123", "BAW456", "KLM101", "AFR789", "SAS202", "UAE303"};
  return pool;
}

inline sim::WorldConfig random_world(Rng& rng, int max_cwps = 5) {
  sim::WorldConfig c;
  const auto k = pick(rng, 1, max_cwps);
  for (std::int64_t i = 1; i <= k; ++i) c.locals.push_back("cwp" + std::to_string(i));
  c.seed = rng();
  c.net.latency_ms = pick(rng, 1, 10);
  c.net.jitter_ms = pick(rng, 0, 15);
  c.legacy = false;
  return c;
}

inline protocol::Document create_payload(Rng& rng, const std::string& callsign) {
  using protocol::Value;
  static const std::vector<std::string> types{"A320", "B738", "E190", "A388"};
  static const std::vector<std::string> airports{"EDDF", "EDDH", "EGLL", "LFPG", "EHAM"};
  protocol::Document d;
  d.add("callsign", Value::text(callsign));
  d.add("aircraft_type", Value::text(types[pick(rng, 0, 3)]));
  d.add("adep", Value::text(airports[pick(rng, 0, 4)]));
  d.add("ades", Value::text(airports[pick(rng, 0, 4)]));
  d.add("eobt", Value::integer(pick(rng, 0, 1439)));
  if (coin(rng, 30)) d.add("runway", Value::text(std::to_string(pick(rng, 10, 36)) + "LCR"[pick(rng, 0, 2)]));
  return d;
}

inline protocol::Document update_payload(Rng& rng, const std::string& callsign) {
  using protocol::Value;
  static const std::vector<std::string> statuses{"filed", "cleared", "taxiing", "departed"};
  protocol::Document d;
  d.add("callsign", Value::text(callsign));
  if (coin(rng)) d.add("runway", Value::text(std::to_string(pick(rng, 10, 36))));
  if (coin(rng)) d.add("status", Value::text(statuses[pick(rng, 0, 3)]));
  if (coin(rng, 25)) d.add("eobt", Value::integer(pick(rng, 0, 1439)));
  if (coin(rng, 15)) {
    std::string sq;
    for (int i = 0; i < 4; ++i) sq += static_cast<char>('0' + pick(rng, 0, 7));
    d.add("squawk", Value::text(sq));
  }
  return d;
}

/// One random schema-valid fpl contribution: type and payload.
inline std::pair<std::string, protocol::Document> random_contribution(Rng& rng) {
  const auto& pool = callsign_pool();
  const auto& cs = pool[pick(rng, 0, static_cast<std::int64_t>(pool.size()) - 1)];
  const auto r = pick(rng, 0, 9);
  if (r < 4) return {"fpl.create", create_payload(rng, cs)};
  if (r < 8) return {"fpl.update", update_payload(rng, cs)};
  return {"fpl.delete", protocol::Document{{"callsign", protocol::Value::text(cs)}}};
}

/// Up to `max_contributions` contributions from random CWPs, interleaved in
/// time closely enough to race each other.
inline sim::Scenario random_contributions(Rng& rng, const sim::WorldConfig& world, int max_contributions = 100) {
  sim::Scenario s;
  const auto m = pick(rng, 1, max_contributions);
  std::int64_t t = 0;
  for (std::int64_t i = 0; i < m; ++i) {
    t += pick(rng, 0, 12);
    auto [type, payload] = random_contribution(rng);
    sim::Action a;
    a.at_ms = t;
    a.actor = world.locals[pick(rng, 0, static_cast<std::int64_t>(world.locals.size()) - 1)];
    a.kind = sim::ActionKind::contribute;
    a.args = {type};
    a.payload = std::move(payload);
    s.actions.push_back(std::move(a));
  }
  return s;
}

}  // namespace acwp::testing
