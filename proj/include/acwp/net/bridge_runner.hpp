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

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "acwp/federation/bridge.hpp"
#include "acwp/net/client.hpp"

namespace acwp::net {

/// Bridge configuration file, in the document grammar:
///
///   bridge.local = "cwp1"
///   bridge.local_endpoint = "127.0.0.1:7701"
///   bridge.central = "central"
///   bridge.central_endpoint = "127.0.0.1:7700"
///   bridge.rules = "routes.rules"
///   bridge.buffer_limit = 10000
///   local_topics.0 = "selection"
struct BridgeConfig {
  std::string local_id;
  Endpoint local_endpoint;
  std::string central_id;
  Endpoint central_endpoint;
  std::filesystem::path rules_file;
  std::size_t buffer_limit = federation::kDefaultBridgeBufferLimit;
  std::int64_t retry_ms = 200;
  std::set<std::string, std::less<>> local_topics;
};

BridgeConfig load_bridge_config(const std::filesystem::path& file);

/// Runs a BridgeCore between two live brokers. Each side is (re)connected on
/// its own schedule; while one side is down, messages for it are buffered.
class LiveBridge {
 public:
  LiveBridge(BridgeConfig config, federation::RuleSet rules);
  ~LiveBridge();

  void start();
  void stop();
  /// True once both sides are connected and subscribed.
  bool ready() const;

 private:
  struct SideState {
    std::unique_ptr<BlockingClient> client;
    std::set<std::string> subscribed;
  };

  void run();
  bool ensure(federation::Side side);
  void refresh(federation::Side side);
  void on_message(federation::Side from, const protocol::Envelope& env);
  SideState& state(federation::Side s) { return s == federation::Side::local ? local_ : central_; }

  BridgeConfig config_;
  federation::BridgeCore core_;
  mutable std::mutex mu_;
  SideState local_;
  SideState central_;
  std::atomic<bool> running_{false};
  std::atomic<bool> ready_{false};
  std::mutex wake_mu_;
  std::condition_variable wake_;
  std::thread thread_;
};

}  // namespace acwp::net
