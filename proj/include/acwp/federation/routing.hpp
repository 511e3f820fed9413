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

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acwp/protocol/envelope.hpp"

namespace acwp::federation {

/// up: local -> central, down: central -> every local.
enum class Direction { up, down, both };

std::string_view direction_name(Direction d);

struct RoutingRule {
  std::string pattern;  // exact topic name or `<prefix>.*`
  Direction direction = Direction::both;

  bool is_prefix() const { return pattern.ends_with(".*"); }
  /// Prefix patterns never match `.dlq` topics; those must be named exactly.
  bool matches(std::string_view topic) const;
  bool allows(Direction travel) const {
    return direction == Direction::both || direction == travel;
  }

  friend bool operator==(const RoutingRule&, const RoutingRule&) = default;
};

class RoutingError : public std::runtime_error {
 public:
  enum class Kind { syntax, local_scope_rule };
  RoutingError(Kind kind, const std::string& message, std::size_t line)
      : std::runtime_error(message), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Forwarding rules plus the names of local-scope topics, which no rule may
/// carry. Reply topics (`_reply.*`) and dlq siblings of local topics are
/// always local.
class RuleSet {
 public:
  RuleSet() = default;
  RuleSet(std::vector<RoutingRule> rules, std::set<std::string, std::less<>> local_topics);

  bool is_local(std::string_view topic) const;
  /// True iff some rule matches the topic for this travel direction and the
  /// topic is not local-scope.
  bool routes(std::string_view topic, Direction travel) const;

  const std::vector<RoutingRule>& rules() const { return rules_; }
  void add_local_topic(std::string topic) { local_topics_.insert(std::move(topic)); }
  bool empty() const { return rules_.empty(); }

 private:
  std::vector<RoutingRule> rules_;
  std::set<std::string, std::less<>> local_topics_;
};

/// Parses `route <topic-or-prefix.*> <up|down|both>` lines; `#` starts a
/// comment line. Throws RoutingError(syntax) or RoutingError(local_scope_rule)
/// when a rule names a local-scope topic.
RuleSet load_routing_rules(std::string_view text,
                           const std::set<std::string, std::less<>>& local_topics = {});

/// Forward iff a rule matches with a compatible direction, the destination
/// broker is not already in the hop trace and the topic is not local-scope.
bool should_forward(const protocol::Envelope& env, const RuleSet& rules,
                    std::string_view destination, Direction travel);

/// Copy of `env` with the destination appended to its hop trace. Every other
/// field, payload included, is unchanged.
protocol::Envelope bridge_forward(protocol::Envelope env, std::string_view destination);

}  // namespace acwp::federation
