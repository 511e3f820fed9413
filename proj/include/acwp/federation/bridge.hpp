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
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "acwp/broker/broker.hpp"
#include "acwp/federation/routing.hpp"
#include "acwp/status.hpp"

namespace acwp::federation {

inline constexpr std::size_t kDefaultBridgeBufferLimit = 10000;

enum class Side { local, central };

struct BridgeOptions {
  std::string local_id;
  std::string central_id;
  RuleSet rules;
  std::size_t buffer_limit = kDefaultBridgeBufferLimit;
};

/// Transport-free forwarding logic of one local<->central bridge. The bridge
/// is a client of both brokers; every message it receives passes through
/// on_message(), which decides whether to forward, buffer or withhold the ack.
class BridgeCore {
 public:
  enum class Outcome { not_routed, forwarded, buffered, overflow };

  struct Result {
    Outcome outcome = Outcome::not_routed;
    std::optional<protocol::Envelope> forward;  // set when outcome == forwarded
    /// Overflowed messages stay unacked so the source broker dead-letters
    /// them when their deadline passes.
    bool ack() const { return outcome != Outcome::overflow; }
  };

  explicit BridgeCore(BridgeOptions options);

  const BridgeOptions& options() const { return options_; }
  /// Client id the bridge uses on both brokers.
  std::string client_id() const { return "bridge-" + options_.local_id; }
  const std::string& broker_id(Side side) const {
    return side == Side::local ? options_.local_id : options_.central_id;
  }

  Result on_message(Side from, const protocol::Envelope& env);

  /// Marks the link to `side` up or down. Coming up returns the buffered
  /// envelopes for that side, oldest first.
  std::vector<protocol::Envelope> set_reachable(Side side, bool reachable);
  bool reachable(Side side) const { return side == Side::local ? local_up_ : central_up_; }
  std::size_t buffered(Side side) const {
    return (side == Side::local ? to_local_ : to_central_).size();
  }

  /// Topics the bridge must subscribe to on `side`: those whose messages can
  /// travel away from it.
  std::vector<std::string> subscriptions_for(Side side,
                                             const std::vector<broker::TopicInfo>& topics) const;
  std::string subscription_id(std::string_view topic) const { return client_id() + "." + std::string(topic); }

 private:
  BridgeOptions options_;
  bool local_up_ = true;
  bool central_up_ = true;
  std::deque<protocol::Envelope> to_local_;
  std::deque<protocol::Envelope> to_central_;
};

/// Registry of the two-level hierarchy: one central broker id and the ids of
/// attached local brokers. Attaching never touches central configuration.
class Federation {
 public:
  explicit Federation(std::string central_id) : central_id_(std::move(central_id)) {}

  const std::string& central_id() const { return central_id_; }
  Status attach(const std::string& local_id);
  bool detach(const std::string& local_id);
  bool contains(std::string_view broker_id) const;
  const std::vector<std::string>& locals() const { return locals_; }

 private:
  std::string central_id_;
  std::vector<std::string> locals_;
};

}  // namespace acwp::federation
