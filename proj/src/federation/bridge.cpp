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

#include <algorithm>

namespace acwp::federation {

BridgeCore::BridgeCore(BridgeOptions options) : options_(std::move(options)) {}

BridgeCore::Result BridgeCore::on_message(Side from, const protocol::Envelope& env) {
  const Side to = from == Side::local ? Side::central : Side::local;
  const Direction travel = from == Side::local ? Direction::up : Direction::down;
  const std::string& destination = broker_id(to);
  Result r;
  if (!should_forward(env, options_.rules, destination, travel)) return r;
  auto forwarded = bridge_forward(env, destination);
  if (reachable(to)) {
    r.outcome = Outcome::forwarded;
    r.forward = std::move(forwarded);
    return r;
  }
  auto& buffer = to == Side::local ? to_local_ : to_central_;
  if (buffer.size() >= options_.buffer_limit) {
    r.outcome = Outcome::overflow;
    return r;
  }
  buffer.push_back(std::move(forwarded));
  r.outcome = Outcome::buffered;
  return r;
}

std::vector<protocol::Envelope> BridgeCore::set_reachable(Side side, bool reachable) {
  (side == Side::local ? local_up_ : central_up_) = reachable;
  std::vector<protocol::Envelope> flushed;
  if (!reachable) return flushed;
  auto& buffer = side == Side::local ? to_local_ : to_central_;
  flushed.assign(std::make_move_iterator(buffer.begin()), std::make_move_iterator(buffer.end()));
  buffer.clear();
  return flushed;
}

std::vector<std::string> BridgeCore::subscriptions_for(
    Side side, const std::vector<broker::TopicInfo>& topics) const {
  const Direction travel = side == Side::local ? Direction::up : Direction::down;
  std::vector<std::string> out;
  for (const auto& t : topics) {
    if (t.descriptor.scope == broker::TopicScope::local) continue;
    if (options_.rules.routes(t.descriptor.name, travel)) out.push_back(t.descriptor.name);
  }
  return out;
}

Status Federation::attach(const std::string& local_id) {
  if (!protocol::is_valid_client_id(local_id)) {
    return {ErrorCode::invalid_argument, "invalid broker id '" + local_id + "'"};
  }
  if (contains(local_id)) {
    return {ErrorCode::duplicate_broker, "broker id '" + local_id + "' already in use"};
  }
  locals_.push_back(local_id);
  return {};
}

bool Federation::detach(const std::string& local_id) {
  auto it = std::find(locals_.begin(), locals_.end(), local_id);
  if (it == locals_.end()) return false;
  locals_.erase(it);
  return true;
}

bool Federation::contains(std::string_view broker_id) const {
  return broker_id == central_id_ ||
         std::find(locals_.begin(), locals_.end(), broker_id) != locals_.end();
}

}  // namespace acwp::federation
