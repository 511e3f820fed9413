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

#include "acwp/net/bridge_runner.hpp"

#include <iostream>

#include "acwp/broker/config.hpp"
#include "acwp/broker/frontend.hpp"
#include "acwp/protocol/document.hpp"
#include "acwp/util/files.hpp"

namespace acwp::net {

using federation::Side;

namespace {

std::string require_text(const protocol::Document& doc, std::string_view key) {
  const auto* v = doc.find(key);
  if (v == nullptr || v->kind() != protocol::ValueKind::text) {
    throw ConfigError("bridge config: missing text key '" + std::string(key) + "'");
  }
  return v->as_text();
}

Side other(Side s) { return s == Side::local ? Side::central : Side::local; }

}  // namespace

BridgeConfig load_bridge_config(const std::filesystem::path& file) {
  const auto doc = protocol::parse_document(util::read_file(file));
  BridgeConfig c;
  c.local_id = require_text(doc, "bridge.local");
  c.central_id = require_text(doc, "bridge.central");
  try {
    c.local_endpoint = parse_endpoint(require_text(doc, "bridge.local_endpoint"));
    c.central_endpoint = parse_endpoint(require_text(doc, "bridge.central_endpoint"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bridge config: ") + e.what());
  }
  c.rules_file = require_text(doc, "bridge.rules");
  if (c.rules_file.is_relative()) c.rules_file = file.parent_path() / c.rules_file;
  if (const auto* v = doc.find("bridge.buffer_limit")) {
    if (v->kind() != protocol::ValueKind::integer || v->as_integer() < 0) {
      throw ConfigError("bridge config: bridge.buffer_limit must be a non-negative integer");
    }
    c.buffer_limit = static_cast<std::size_t>(v->as_integer());
  }
  for (std::size_t i = 0;; ++i) {
    const std::string key = "local_topics." + std::to_string(i);
    if (!doc.contains(key)) break;
    c.local_topics.insert(require_text(doc, key));
  }
  return c;
}

LiveBridge::LiveBridge(BridgeConfig config, federation::RuleSet rules)
    : config_(config),
      core_({config.local_id, config.central_id, std::move(rules), config.buffer_limit}) {}

LiveBridge::~LiveBridge() { stop(); }

void LiveBridge::start() {
  running_ = true;
  thread_ = std::thread([this] { run(); });
}

void LiveBridge::stop() {
  {
    std::lock_guard lock(wake_mu_);
    if (!running_.exchange(false)) return;
  }
  wake_.notify_all();
  if (thread_.joinable()) thread_.join();
  std::unique_ptr<BlockingClient> l, c;
  {
    std::lock_guard lock(mu_);
    l = std::move(local_.client);
    c = std::move(central_.client);
  }
}

bool LiveBridge::ready() const { return ready_; }

void LiveBridge::run() {
  while (running_) {
    bool up = ensure(Side::local);
    up = ensure(Side::central) && up;
    if (up) {
      refresh(Side::local);
      refresh(Side::central);
    }
    ready_ = up;
    std::unique_lock lock(wake_mu_);
    wake_.wait_for(lock, std::chrono::milliseconds(up ? 500 : config_.retry_ms),
                   [this] { return !running_.load(); });
  }
}

bool LiveBridge::ensure(Side side) {
  {
    std::lock_guard lock(mu_);
    auto& st = state(side);
    if (st.client && st.client->connected()) return true;
  }
  std::unique_ptr<BlockingClient> stale;
  {
    std::lock_guard lock(mu_);
    auto& st = state(side);
    stale = std::move(st.client);
    st.subscribed.clear();
    core_.set_reachable(side, false);
  }
  stale.reset();
  client::SessionOptions opts;
  opts.client_id = core_.client_id();
  opts.ack_mode = client::AckMode::manual;
  opts.bridge = true;
  const auto& ep = side == Side::local ? config_.local_endpoint : config_.central_endpoint;
  std::unique_ptr<BlockingClient> fresh;
  try {
    fresh = BlockingClient::connect(ep, opts);
  } catch (const client::ClientError& e) {
    return false;
  }
  std::vector<protocol::Envelope> flushed;
  {
    std::lock_guard lock(mu_);
    state(side).client = std::move(fresh);
    flushed = core_.set_reachable(side, true);
    for (auto& env : flushed) state(side).client->session().publish_relayed(env);
  }
  std::cerr << "bridge " << core_.client_id() << ": connected to " << core_.broker_id(side) << " ("
            << ep.to_string() << ")";
  if (!flushed.empty()) std::cerr << ", flushed " << flushed.size();
  std::cerr << "\n";
  refresh(side);
  return true;
}

void LiveBridge::refresh(Side side) {
  BlockingClient* client = nullptr;
  std::set<std::string> have;
  {
    std::lock_guard lock(mu_);
    client = state(side).client.get();
    have = state(side).subscribed;
  }
  if (client == nullptr) return;
  try {
    auto topics = broker::parse_topics_document(client->topics());
    for (const auto& topic : core_.subscriptions_for(side, topics)) {
      if (have.count(topic) != 0) continue;
      client->subscribe_as(core_.subscription_id(topic), topic,
                           [this, side](const protocol::Envelope& env) { on_message(side, env); });
      std::lock_guard lock(mu_);
      state(side).subscribed.insert(topic);
    }
  } catch (const client::ClientError& e) {
    std::cerr << "bridge " << core_.client_id() << ": " << e.what() << "\n";
  }
}

void LiveBridge::on_message(Side from, const protocol::Envelope& env) {
  std::lock_guard lock(mu_);
  auto result = core_.on_message(from, env);
  if (result.forward) {
    auto& dest = state(other(from));
    if (dest.client) dest.client->session().publish_relayed(*result.forward);
  }
  if (result.ack()) {
    auto& src = state(from);
    if (src.client) src.client->session().ack(core_.subscription_id(env.topic), env.message_id);
  }
}

}  // namespace acwp::net
