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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acwp/broker/broker.hpp"
#include "acwp/federation/bridge.hpp"
#include "acwp/protocol/document.hpp"
#include "acwp/protocol/schema.hpp"
#include "acwp/sim/event_log.hpp"
#include "acwp/sim/flight_plan.hpp"
#include "acwp/sim/scenario.hpp"

namespace acwp::sim {

/// Text of the demo schema set (identical to schemas/demo.schema).
std::string_view demo_schema_text();
std::shared_ptr<const protocol::SchemaSet> demo_schemas();

/// Default routing rules for the demo federation.
std::string_view default_routes_text();

struct NetworkModel {
  std::int64_t latency_ms = 5;
  std::int64_t jitter_ms = 0;        // each frame adds rng() % (jitter_ms + 1)
  std::uint32_t drop_permille = 0;   // per frame; 0 keeps links reliable
};

/// World configuration, in the document grammar:
///
///   world.central = "central"
///   world.cwps = 3                  # locals cwp1..cwp3, or list them:
///   locals.0 = "cwp1"
///   world.seed = 7
///   world.ack_deadline_ms = 2000
///   world.max_time_ms = 3600000
///   world.legacy = true
///   world.recovery = true
///   net.latency_ms = 5
///   net.jitter_ms = 3
///   net.drop_permille = 0
///   met.period_ms = 60000
///   bridge.buffer_limit = 10000
///   routes.0 = "fpl.contribution up"
///   local_topics.0 = "selection"
struct WorldConfig {
  std::string central_id = "central";
  std::vector<std::string> locals;
  std::uint64_t seed = 1;
  std::int64_t ack_deadline_ms = broker::kDefaultAckDeadlineMs;
  std::int64_t max_time_ms = 3'600'000;
  bool legacy = true;
  bool recovery = true;
  NetworkModel net;
  std::int64_t met_period_ms = 0;
  std::size_t bridge_buffer_limit = federation::kDefaultBridgeBufferLimit;
  std::vector<std::string> routes;  // empty: default_routes_text()
  std::vector<std::string> local_topics{"selection"};
};

/// Throws ConfigError naming the offending key.
WorldConfig parse_world_config(const protocol::Document& doc);
WorldConfig load_world_config(const std::filesystem::path& file);

struct ConvergenceReport {
  bool ok = true;
  std::vector<std::string> diffs;
  explicit operator bool() const { return ok; }
};

namespace detail {
struct WorldImpl;
}

/// Deterministic discrete-event world: one central broker, one local broker
/// per CWP, a bridge per local broker, the demo components, and a virtual
/// network. Every frame is encoded and decoded on each hop. Events run in
/// (time, insertion) order on the caller's thread.
///
/// Components: "fdps" owns fpl, "metsrc" owns met, "recovery" reads the dead
/// letter topics and "legacy" feeds fixed-width lines, all on the central
/// broker. CWP client "<id>" runs on local broker "<id>".
class SimWorld {
 public:
  explicit SimWorld(WorldConfig config);
  ~SimWorld();
  SimWorld(const SimWorld&) = delete;
  SimWorld& operator=(const SimWorld&) = delete;

  const WorldConfig& config() const;
  std::int64_t now() const;
  /// Virtual time at which setup reached quiescence; scenario time zero.
  std::int64_t setup_end() const;
  const EventLog& log() const;

  std::vector<std::string> broker_ids() const;
  broker::Broker& broker(std::string_view id);
  const federation::Federation& federation() const;

  const FplOwnerState& owner_state() const;
  std::int64_t owner_qnh() const;
  std::vector<std::string> cwp_ids() const;
  CwpReplica& replica(std::string_view cwp);
  const CwpReplica& replica(std::string_view cwp) const;
  /// CWPs that were present from setup, stayed connected and subscribed.
  bool in_convergence_set(std::string_view cwp) const;
  std::size_t recovered_count() const;
  std::size_t pending_events() const;

  /// Runs the action now (virtual time), as if scheduled.
  void perform(const Action& action);
  void schedule(std::int64_t at_ms, std::function<void()> fn);
  /// Processes events until none remain or max_time_ms is passed.
  void run();

 private:
  std::unique_ptr<detail::WorldImpl> impl_;
};

std::unique_ptr<SimWorld> build_world(const WorldConfig& config);
/// Schedules every action at setup_end() + at_ms and runs to quiescence.
const EventLog& run_scenario(SimWorld& world, const Scenario& script);

/// Domain "fpl": every CWP in the convergence set holds exactly the owner's
/// flight plans. Domain "met": every such CWP saw the owner's latest QNH.
ConvergenceReport assert_converged(const SimWorld& world, std::string_view domain);

/// Publishes selection.update on the local "selection" topic.
std::string cwp_select(client::Session& session, std::string_view callsign);

}  // namespace acwp::sim
