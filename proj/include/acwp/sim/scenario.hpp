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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acwp/protocol/document.hpp"

namespace acwp::sim {

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& message, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class ActionKind {
  contribute,     // contribute <type> [path=value ...]
  publish,        // publish <topic> <type> [path=value ...]
  subscribe,      // subscribe <topic>
  withhold_ack,   // withhold_ack <topic> [off]
  disconnect,     // disconnect
  attach_broker,  // attach_broker <id>
  detach_broker,  // detach_broker <id>
  partition,      // partition <local-broker-id>
  heal,           // heal <local-broker-id>
  select,         // select <callsign>
  legacy,         // legacy "<fixed-width line>"
};

std::string_view action_name(ActionKind kind);

struct Action {
  std::int64_t at_ms = 0;
  std::string actor;
  ActionKind kind = ActionKind::contribute;
  std::vector<std::string> args;  // positional arguments, unquoted
  protocol::Document payload;     // path=value arguments
};

/// Timed actions; times are relative to the end of world setup.
struct Scenario {
  std::vector<Action> actions;
};

/// Lines `at <ms> <actor> <action> [args...]`; blank lines and `#` comments
/// are skipped. Throws ScenarioError with the line number.
Scenario parse_scenario(std::string_view text);
std::string format_scenario(const Scenario& scenario);

}  // namespace acwp::sim
