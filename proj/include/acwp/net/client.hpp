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
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "acwp/client/session.hpp"
#include "acwp/net/socket.hpp"

namespace acwp::net {

inline constexpr std::int64_t kDefaultCallTimeoutMs = 5000;

/// A Session bound to a TCP connection. Frames are read on a reader thread
/// that also completes pending calls; subscription handlers run one at a time
/// on a separate dispatch thread. The blocking helpers must not be called
/// from a completion callback.
class BlockingClient : private client::Transport {
 public:
  /// Throws ClientError(connection_refused | duplicate_client | timeout).
  static std::unique_ptr<BlockingClient> connect(const Endpoint& endpoint,
                                                 client::SessionOptions options,
                                                 std::int64_t timeout_ms = kDefaultCallTimeoutMs);
  ~BlockingClient() override;

  client::Session& session() { return *session_; }
  const std::string& client_id() const { return session_->client_id(); }
  bool connected() const { return session_->connected(); }

  std::string publish(std::string_view topic, std::string_view message_type,
                      protocol::Document payload, const client::PublishOptions& opts = {});
  /// Publishes, then waits until the broker has handled the frame. Returns
  /// the broker's verdict.
  Status publish_confirmed(std::string_view topic, std::string_view message_type,
                           protocol::Document payload, std::string* message_id = nullptr,
                           const client::PublishOptions& opts = {});
  /// The blocking calls below throw ClientError with the broker's verdict.
  std::string subscribe(std::string_view topic, client::MessageHandler handler);
  void subscribe_as(std::string_view subscription_id, std::string_view topic,
                    client::MessageHandler handler);
  void unsubscribe(std::string_view subscription_id);
  void own_domain(std::string_view domain, client::ContributionHandler handler);
  protocol::Envelope request(std::string_view topic, std::string_view message_type,
                             protocol::Document payload,
                             std::int64_t timeout_ms = client::kDefaultRequestTimeoutMs);
  protocol::Document topics();
  void barrier();

  void set_error_callback(client::ErrorCallback callback);
  /// Sends DISCONNECT and waits briefly for the broker to close the socket.
  void disconnect();
  /// Waits until the connection is gone.
  bool wait_closed(std::int64_t timeout_ms);

 private:
  BlockingClient(Socket socket, client::SessionOptions options);
  void send(const protocol::Frame& frame) override;
  void read_loop();
  void dispatch_loop();
  void post(std::vector<client::Work> work);
  void on_error(const Status& status, std::string_view ref);
  Status wait_status(const std::function<void(client::Completion)>& start);

  Socket socket_;
  std::mutex write_mu_;
  std::unique_ptr<client::Session> session_;

  std::thread reader_;
  std::thread dispatcher_;
  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<client::Work> queue_;
  bool stopping_ = false;

  std::mutex state_mu_;
  std::condition_variable state_cv_;
  bool closed_ = false;

  std::mutex errors_mu_;
  std::deque<std::pair<std::string, Status>> recent_errors_;
  client::ErrorCallback user_error_;
};

}  // namespace acwp::net
