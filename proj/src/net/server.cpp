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

#include "acwp/net/server.hpp"

#include <sys/socket.h>

#include <chrono>
#include <deque>
#include <vector>

namespace acwp::net {

std::int64_t wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct BrokerServer::Connection {
  broker::ConnectionId id = 0;
  Socket socket;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> queue;
  bool closing = false;
  std::thread read_thread;
  std::thread write_thread;
  std::atomic<bool> reader_done{false};
  std::atomic<bool> writer_done{false};

  void push(std::string bytes, bool close) {
    std::lock_guard lock(mu);
    if (closing) return;
    queue.push_back(std::move(bytes));
    if (close) closing = true;
    cv.notify_one();
  }
  void close_after_flush() {
    std::lock_guard lock(mu);
    closing = true;
    cv.notify_one();
  }
};

BrokerServer::BrokerServer(std::unique_ptr<broker::Broker> broker, std::string role)
    : broker_(std::move(broker)), frontend_(*broker_, std::move(role)) {}

BrokerServer::~BrokerServer() { stop(); }

Endpoint BrokerServer::start(const Endpoint& listen) {
  listener_ = listen_tcp(listen);
  Endpoint bound{listen.host, local_port(listener_)};
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
  ticker_ = std::thread([this] { tick_loop(); });
  return bound;
}

void BrokerServer::stop() {
  {
    std::lock_guard lock(stop_mu_);
    if (!running_.exchange(false)) return;
  }
  stop_cv_.notify_all();
  if (acceptor_.joinable()) acceptor_.join();
  if (ticker_.joinable()) ticker_.join();
  std::map<broker::ConnectionId, std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(engine_);
    conns = connections_;
  }
  for (auto& [id, c] : conns) {
    c->socket.shutdown();
    c->close_after_flush();
  }
  for (auto& [id, c] : conns) {
    if (c->read_thread.joinable()) c->read_thread.join();
    if (c->write_thread.joinable()) c->write_thread.join();
  }
  std::lock_guard lock(engine_);
  connections_.clear();
  listener_.close();
}

void BrokerServer::wait() {
  std::unique_lock lock(stop_mu_);
  stop_cv_.wait(lock, [this] { return !running_.load(); });
}

std::size_t BrokerServer::connection_count() const {
  std::lock_guard lock(engine_);
  return connections_.size();
}

void BrokerServer::accept_loop() {
  while (running_) {
    reap();
    if (!listener_.wait_readable(50)) continue;
    Socket s(::accept(listener_.fd(), nullptr, nullptr));
    if (!s.valid()) continue;
    auto conn = std::make_shared<Connection>();
    conn->socket = std::move(s);
    {
      std::lock_guard lock(engine_);
      conn->id = next_id_++;
      connections_[conn->id] = conn;
    }
    conn->read_thread = std::thread([this, conn] { reader(conn); });
    conn->write_thread = std::thread([this, conn] { writer(conn); });
  }
}

void BrokerServer::reap() {
  std::vector<std::shared_ptr<Connection>> dead;
  {
    std::lock_guard lock(engine_);
    for (auto it = connections_.begin(); it != connections_.end();) {
      if (it->second->reader_done && it->second->writer_done) {
        dead.push_back(it->second);
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& c : dead) {
    c->read_thread.join();
    c->write_thread.join();
  }
}

void BrokerServer::tick_loop() {
  while (running_) {
    {
      std::lock_guard lock(engine_);
      route_locked(frontend_.tick(wall_clock_ms()));
    }
    std::unique_lock lock(stop_mu_);
    stop_cv_.wait_for(lock, std::chrono::milliseconds(10), [this] { return !running_.load(); });
  }
}

void BrokerServer::route_locked(std::vector<broker::Outbound> out) {
  for (auto& o : out) {
    auto it = connections_.find(o.connection);
    if (it == connections_.end()) continue;
    it->second->push(protocol::encode_frame(o.frame), o.close);
  }
}

void BrokerServer::reader(std::shared_ptr<Connection> conn) {
  protocol::FrameDecoder decoder;
  char buf[16384];
  bool failed = false;
  while (!failed) {
    long n = conn->socket.recv_some(buf, sizeof buf);
    if (n <= 0) break;
    decoder.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    try {
      while (auto frame = decoder.next()) {
        std::lock_guard lock(engine_);
        route_locked(frontend_.handle(conn->id, *frame, wall_clock_ms()));
      }
    } catch (const protocol::ProtocolError& e) {
      std::lock_guard lock(engine_);
      route_locked(frontend_.protocol_failure(conn->id, e));
      failed = true;
    }
  }
  {
    std::lock_guard lock(engine_);
    route_locked(frontend_.connection_closed(conn->id, wall_clock_ms()));
  }
  conn->close_after_flush();
  conn->reader_done = true;
}

void BrokerServer::writer(std::shared_ptr<Connection> conn) {
  for (;;) {
    std::string bytes;
    {
      std::unique_lock lock(conn->mu);
      conn->cv.wait(lock, [&] { return !conn->queue.empty() || conn->closing; });
      if (conn->queue.empty()) break;
      bytes = std::move(conn->queue.front());
      conn->queue.pop_front();
    }
    if (!conn->socket.send_all(bytes)) break;
  }
  conn->socket.shutdown();
  conn->writer_done = true;
}

}  // namespace acwp::net
