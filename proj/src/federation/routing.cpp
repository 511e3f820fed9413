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

#include "acwp/federation/routing.hpp"

#include <algorithm>
#include <cctype>

#include "acwp/broker/topic.hpp"

namespace acwp::federation {

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::up: return "up";
    case Direction::down: return "down";
    case Direction::both: return "both";
  }
  return "both";
}

bool RoutingRule::matches(std::string_view topic) const {
  if (!is_prefix()) return topic == pattern;
  if (broker::is_dead_letter_name(topic)) return false;
  const std::string_view prefix = std::string_view(pattern).substr(0, pattern.size() - 1);  // keeps '.'
  return topic.size() > prefix.size() && topic.starts_with(prefix);
}

RuleSet::RuleSet(std::vector<RoutingRule> rules, std::set<std::string, std::less<>> local_topics)
    : rules_(std::move(rules)), local_topics_(std::move(local_topics)) {}

bool RuleSet::is_local(std::string_view topic) const {
  if (topic.starts_with("_reply.")) return true;
  if (local_topics_.contains(topic)) return true;
  if (broker::is_dead_letter_name(topic)) {
    return is_local(topic.substr(0, topic.size() - broker::kDeadLetterSuffix.size()));
  }
  return false;
}

bool RuleSet::routes(std::string_view topic, Direction travel) const {
  if (is_local(topic)) return false;
  return std::any_of(rules_.begin(), rules_.end(),
                     [&](const RoutingRule& r) { return r.allows(travel) && r.matches(topic); });
}

RuleSet load_routing_rules(std::string_view text,
                           const std::set<std::string, std::less<>>& local_topics) {
  RuleSet set({}, local_topics);
  std::vector<RoutingRule> rules;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;

    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    if (tokens.empty() || tokens.front().front() == '#') continue;
    auto fail = [&](const std::string& what) {
      throw RoutingError(RoutingError::Kind::syntax, "line " + std::to_string(line_no) + ": " + what,
                         line_no);
    };
    if (tokens.size() != 3 || tokens[0] != "route") fail("expected 'route <topic> <up|down|both>'");
    RoutingRule rule;
    rule.pattern = std::string(tokens[1]);
    const std::string_view base =
        rule.is_prefix() ? std::string_view(rule.pattern).substr(0, rule.pattern.size() - 2)
                         : std::string_view(rule.pattern);
    if (!protocol::is_valid_topic_name(base)) fail("invalid topic pattern '" + rule.pattern + "'");
    if (tokens[2] == "up") {
      rule.direction = Direction::up;
    } else if (tokens[2] == "down") {
      rule.direction = Direction::down;
    } else if (tokens[2] == "both") {
      rule.direction = Direction::both;
    } else {
      fail("unknown direction '" + std::string(tokens[2]) + "'");
    }
    if (!rule.is_prefix() && set.is_local(rule.pattern)) {
      throw RoutingError(RoutingError::Kind::local_scope_rule,
                         "line " + std::to_string(line_no) + ": topic '" + rule.pattern +
                             "' is local-scope and cannot be routed",
                         line_no);
    }
    rules.push_back(std::move(rule));
  }
  return RuleSet(std::move(rules), local_topics);
}

bool should_forward(const protocol::Envelope& env, const RuleSet& rules,
                    std::string_view destination, Direction travel) {
  if (std::find(env.hop_trace.begin(), env.hop_trace.end(), destination) != env.hop_trace.end()) {
    return false;
  }
  return rules.routes(env.topic, travel);
}

protocol::Envelope bridge_forward(protocol::Envelope env, std::string_view destination) {
  env.hop_trace.emplace_back(destination);
  return env;
}

}  // namespace acwp::federation
