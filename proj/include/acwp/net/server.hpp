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
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "acwp/broker/broker.hpp"
#include "acwp/broker/frontend.hpp"
#include "acwp/net/socket.hpp"

namespace acwp::net {

std::int64_t wall_clock_ms();

/// Serves one Broker over TCP. Every connection gets a reader and a writer
/// thread; broker state is guarded by a single engine mutex.
class BrokerServer {
 public:
  BrokerServer(std::unique_ptr<broker::Broker> broker, std::string role);
  ~BrokerServer();
  BrokerServer(const BrokerServer&) = delete;
  BrokerServer& operator=(const BrokerServer&) = delete;

  /// Binds and starts serving. Returns the bound endpoint.
  Endpoint start(const Endpoint& listen);
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

  const std::string& id() const { return broker_->id(); }
  std::size_t connection_count() const;

 private:
  struct Connection;

  void accept_loop();
  void tick_loop();
  void reader(std::shared_ptr<Connection> conn);
  void writer(std::shared_ptr<Connection> conn);
  void route_locked(std::vector<broker::Outbound> out);
  void reap();

  std::unique_ptr<broker::Broker> broker_;
  broker::Frontend frontend_;
  mutable std::mutex engine_;
  std::map<broker::ConnectionId, std::shared_ptr<Connection>> connections_;
  broker::ConnectionId next_id_ = 1;

  Socket listener_;
  std::thread acceptor_;
  std::thread ticker_;
  std::atomic<bool> running_{false};
  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
};

}  // namespace acwp::net
