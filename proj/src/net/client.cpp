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

#include "acwp/net/client.hpp"

#include <chrono>
#include <future>

#include "acwp/net/server.hpp"
#include "acwp/protocol/errors.hpp"

namespace acwp::net {

using client::ClientError;
using client::Completion;
using client::Work;

namespace {

constexpr std::size_t kRecentErrorLimit = 512;

template <typename T>
T wait_future(std::future<T>& f, std::int64_t timeout_ms, const char* what) {
  if (f.wait_for(std::chrono::milliseconds(timeout_ms)) != std::future_status::ready) {
    throw ClientError({ErrorCode::timeout, std::string(what) + " timed out"});
  }
  return f.get();
}

}  // namespace

BlockingClient::BlockingClient(Socket socket, client::SessionOptions options)
    : socket_(std::move(socket)),
      session_(std::make_unique<client::Session>(std::move(options), static_cast<client::Transport&>(*this))) {
  session_->set_error_callback([this](const Status& s, std::string_view ref) { on_error(s, ref); });
  reader_ = std::thread([this] { read_loop(); });
  dispatcher_ = std::thread([this] { dispatch_loop(); });
}

std::unique_ptr<BlockingClient> BlockingClient::connect(const Endpoint& endpoint,
                                                        client::SessionOptions options,
                                                        std::int64_t timeout_ms) {
  Socket s = connect_tcp(endpoint);
  std::unique_ptr<BlockingClient> c(new BlockingClient(std::move(s), std::move(options)));
  auto promise = std::make_shared<std::promise<Status>>();
  auto future = promise->get_future();
  c->session_->connect([promise](const Status& st) { promise->set_value(st); });
  Status st = wait_future(future, timeout_ms, "connect");
  if (!st.ok()) throw ClientError(st);
  return c;
}

BlockingClient::~BlockingClient() {
  try {
    disconnect();
  } catch (...) {
  }
  socket_.shutdown();
  if (reader_.joinable()) reader_.join();
  {
    std::lock_guard lock(queue_mu_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (dispatcher_.joinable()) dispatcher_.join();
}

void BlockingClient::send(const protocol::Frame& frame) {
  const std::string bytes = protocol::encode_frame(frame);
  std::lock_guard lock(write_mu_);
  socket_.send_all(bytes);
}

void BlockingClient::post(std::vector<Work> work) {
  if (work.empty()) return;
  {
    std::lock_guard lock(queue_mu_);
    for (auto& w : work) queue_.push_back(std::move(w));
  }
  queue_cv_.notify_one();
}

void BlockingClient::read_loop() {
  protocol::FrameDecoder decoder;
  char buf[16384];
  for (;;) {
    if (socket_.wait_readable(20)) {
      long n = socket_.recv_some(buf, sizeof buf);
      if (n <= 0) break;
      decoder.feed(std::string_view(buf, static_cast<std::size_t>(n)));
      try {
        while (auto frame = decoder.next()) {
          auto in = session_->on_frame(*frame);
          for (auto& w : in.control) w();
          post(std::move(in.deliveries));
        }
      } catch (const protocol::ProtocolError& e) {
        on_error({ErrorCode::protocol_error, e.what()}, {});
        break;
      }
    }
    for (auto& w : session_->tick(wall_clock_ms())) w();
  }
  for (auto& w : session_->on_transport_closed()) w();
  {
    std::lock_guard lock(state_mu_);
    closed_ = true;
  }
  state_cv_.notify_all();
}

void BlockingClient::dispatch_loop() {
  for (;;) {
    Work w;
    {
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      w = std::move(queue_.front());
      queue_.pop_front();
    }
    w();
  }
}

void BlockingClient::on_error(const Status& status, std::string_view ref) {
  client::ErrorCallback cb;
  {
    std::lock_guard lock(errors_mu_);
    if (!ref.empty()) {
      recent_errors_.emplace_back(std::string(ref), status);
      if (recent_errors_.size() > kRecentErrorLimit) recent_errors_.pop_front();
    }
    cb = user_error_;
  }
  if (cb) cb(status, ref);
}

void BlockingClient::set_error_callback(client::ErrorCallback callback) {
  std::lock_guard lock(errors_mu_);
  user_error_ = std::move(callback);
}

Status BlockingClient::wait_status(const std::function<void(Completion)>& start) {
  auto promise = std::make_shared<std::promise<Status>>();
  auto future = promise->get_future();
  start([promise](const Status& st) { promise->set_value(st); });
  return wait_future(future, kDefaultCallTimeoutMs, "broker call");
}

std::string BlockingClient::publish(std::string_view topic, std::string_view message_type,
                                    protocol::Document payload, const client::PublishOptions& opts) {
  return session_->publish(topic, message_type, std::move(payload), opts);
}

Status BlockingClient::publish_confirmed(std::string_view topic, std::string_view message_type,
                                         protocol::Document payload, std::string* message_id,
                                         const client::PublishOptions& opts) {
  const std::string id = session_->publish(topic, message_type, std::move(payload), opts);
  if (message_id != nullptr) *message_id = id;
  barrier();
  std::lock_guard lock(errors_mu_);
  for (const auto& [ref, status] : recent_errors_) {
    if (ref == id) return status;
  }
  return Status::Ok();
}

std::string BlockingClient::subscribe(std::string_view topic, client::MessageHandler handler) {
  std::string id;
  Status st = wait_status([&](Completion done) {
    id = session_->subscribe(topic, std::move(handler), std::move(done));
  });
  if (!st.ok()) throw ClientError(st);
  return id;
}

void BlockingClient::subscribe_as(std::string_view subscription_id, std::string_view topic,
                                  client::MessageHandler handler) {
  Status st = wait_status([&](Completion done) {
    session_->subscribe_as(subscription_id, topic, std::move(handler), std::move(done));
  });
  if (!st.ok()) throw ClientError(st);
}

void BlockingClient::unsubscribe(std::string_view subscription_id) {
  Status st = wait_status([&](Completion done) { session_->unsubscribe(subscription_id, std::move(done)); });
  if (!st.ok()) throw ClientError(st);
}

void BlockingClient::own_domain(std::string_view domain, client::ContributionHandler handler) {
  Status st = wait_status([&](Completion done) {
    session_->own_domain(domain, std::move(handler), std::move(done));
  });
  if (!st.ok()) throw ClientError(st);
}

protocol::Envelope BlockingClient::request(std::string_view topic, std::string_view message_type,
                                           protocol::Document payload, std::int64_t timeout_ms) {
  using Result = std::pair<Status, std::optional<protocol::Envelope>>;
  auto promise = std::make_shared<std::promise<Result>>();
  auto future = promise->get_future();
  session_->request(topic, message_type, std::move(payload), timeout_ms,
                    [promise](const Status& st, const protocol::Envelope* env) {
                      promise->set_value({st, env ? std::optional(*env) : std::nullopt});
                    });
  Result r = wait_future(future, timeout_ms + kDefaultCallTimeoutMs, "request");
  if (!r.first.ok()) throw ClientError(r.first);
  return std::move(*r.second);
}

protocol::Document BlockingClient::topics() {
  using Result = std::pair<Status, protocol::Document>;
  auto promise = std::make_shared<std::promise<Result>>();
  auto future = promise->get_future();
  session_->query_topics([promise](const Status& st, const protocol::Document& doc) {
    promise->set_value({st, doc});
  });
  Result r = wait_future(future, kDefaultCallTimeoutMs, "topics");
  if (!r.first.ok()) throw ClientError(r.first);
  return std::move(r.second);
}

void BlockingClient::barrier() {
  Status st = wait_status([&](Completion done) { session_->barrier(std::move(done)); });
  if (!st.ok()) throw ClientError(st);
}

void BlockingClient::disconnect() {
  if (!session_->connected()) return;
  session_->disconnect();
  wait_closed(1000);
}

bool BlockingClient::wait_closed(std::int64_t timeout_ms) {
  std::unique_lock lock(state_mu_);
  return state_cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms), [this] { return closed_; });
}

}  // namespace acwp::net
