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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acwp/protocol/envelope.hpp"
#include "acwp/protocol/frame.hpp"
#include "acwp/protocol/schema.hpp"
#include "acwp/status.hpp"

namespace acwp::client {

using protocol::Document;
using protocol::Envelope;
using protocol::Frame;

inline constexpr std::int64_t kDefaultRequestTimeoutMs = 5000;

/// Where a session writes its frames. Implementations must not call back
/// into the session.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const Frame& frame) = 0;
};

class ClientError : public std::runtime_error {
 public:
  explicit ClientError(Status status)
      : std::runtime_error(status.to_string()), status_(std::move(status)) {}
  const Status& status() const { return status_; }
  ErrorCode code() const { return status_.code(); }

 private:
  Status status_;
};

enum class AckMode { automatic, manual };

using MessageHandler = std::function<void(const Envelope&)>;
using Completion = std::function<void(const Status&)>;
using ReplyCompletion = std::function<void(const Status&, const Envelope*)>;
/// Asynchronous failures: broker ERROR frames that answer a publish, inbound
/// messages that fail validation, handlers that throw. `ref` is the message
/// id concerned, when known.
using ErrorCallback = std::function<void(const Status&, std::string_view ref)>;

/// One output of a data owner's processing step, published on the domain's
/// publication or rejection topic.
struct OwnerOutput {
  enum class Target { publication, rejection };
  Target target = Target::publication;
  std::string message_type;
  Document payload;
};
using ContributionHandler = std::function<std::vector<OwnerOutput>(const Envelope&)>;

struct SessionOptions {
  std::string client_id;
  AckMode ack_mode = AckMode::automatic;
  std::shared_ptr<const protocol::SchemaSet> schemas;  // null disables local validation
  protocol::ValidationMode validation = protocol::ValidationMode::strict;
  bool bridge = false;
  std::function<std::int64_t()> clock;  // ms since epoch; system clock by default
};

struct PublishOptions {
  std::optional<std::string> correlation_id;
  std::optional<std::string> reply_to;
};

using Work = std::function<void()>;

/// Work produced by one inbound frame. `control` completes pending calls and
/// must run promptly; `deliveries` invoke subscription handlers and must run
/// sequentially, in order, on one context.
struct Inbound {
  std::vector<Work> control;
  std::vector<Work> deliveries;
};

/// Client side of the protocol, independent of any transport. All methods are
/// thread-safe; frame writes are serialized. Frames go out through the
/// Transport, inbound frames come in through on_frame().
class Session {
 public:
  Session(SessionOptions options, Transport& transport);
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& client_id() const { return options_.client_id; }
  bool connected() const;

  void connect(Completion done = {});

  /// Validates the payload against the local schema set before anything is
  /// written; throws ClientError(schema_violation | unknown_message_type)
  /// and sends nothing on failure. Returns the message id once the frame is
  /// written; broker-side rejections arrive on the error callback.
  std::string publish(std::string_view topic, std::string_view message_type, Document payload,
                      const PublishOptions& opts = {});
  std::string contribute(std::string_view domain, std::string_view message_type, Document payload);
  /// Bridges only: sends an envelope as-is (original sender and hop trace).
  void publish_relayed(const Envelope& env);

  /// Returns the subscription id. `done` reports the broker's verdict
  /// (e.g. ownership_violation).
  std::string subscribe(std::string_view topic, MessageHandler handler, Completion done = {});
  /// Subscribes with a caller-chosen id.
  void subscribe_as(std::string_view subscription_id, std::string_view topic,
                    MessageHandler handler, Completion done = {});
  void unsubscribe(std::string_view subscription_id, Completion done = {});

  /// Registers ownership. Each contribution is passed to `handler` and its
  /// outputs are published with correlation_id = the contribution's id.
  void own_domain(std::string_view domain, ContributionHandler handler, Completion done = {});

  /// Publishes with reply_to = `_reply.<client_id>` and a fresh correlation
  /// id, and completes with the first reply bearing that id, or timeout.
  std::string request(std::string_view topic, std::string_view message_type, Document payload,
                      std::int64_t timeout_ms, ReplyCompletion done);
  void cancel_request(std::string_view correlation_id);
  /// Publishes a reply to `request` on its reply_to topic.
  std::string reply(const Envelope& request, std::string_view message_type, Document payload);

  void ack(std::string_view subscription_id, std::string_view message_id);
  void set_ack_mode(AckMode mode);
  AckMode ack_mode() const;

  /// Sends PING with `info: topics`; `done` receives the broker's topic table.
  void query_topics(std::function<void(const Status&, const Document&)> done);
  /// Sends a PING barrier; `done` runs once every earlier frame was handled.
  void barrier(Completion done);

  void disconnect();
  void set_error_callback(ErrorCallback callback);

  Inbound on_frame(const Frame& frame);
  /// Expires requests whose deadline has passed.
  std::vector<Work> tick(std::int64_t now_ms);
  std::optional<std::int64_t> next_timeout() const;
  /// Fails every pending call with not_connected.
  std::vector<Work> on_transport_closed();

  std::uint64_t frames_sent() const;

 private:
  enum class SubKind { plain, owner, reply };
  struct Sub {
    std::string topic;
    SubKind kind = SubKind::plain;
    MessageHandler handler;
    ContributionHandler contribution;
    std::string domain;
  };
  struct PendingOp {
    enum class Kind { subscribe, unsubscribe, own, info, barrier } kind;
    std::string key;
    Completion done;
    std::function<void(const Status&, const Document&)> info_done;
    Status status;
  };
  struct PendingRequest {
    std::int64_t deadline_ms;
    ReplyCompletion done;
  };

  std::int64_t now() const;
  void send_locked(const Frame& frame);
  void require_open_locked() const;
  std::string next_message_id_locked();
  std::uint64_t barrier_locked(PendingOp op);
  std::string publish_locked(std::string_view topic, std::string_view message_type,
                             Document payload, const PublishOptions& opts);
  void ensure_reply_subscription_locked();
  Work delivery_work(const Sub& sub, const std::string& subscription_id, Envelope env);
  void report(std::vector<Work>& out, Status status, std::string ref);
  void run_owner(const Sub& sub, const std::string& subscription_id, const Envelope& env);

  SessionOptions options_;
  Transport& transport_;
  mutable std::mutex mu_;
  enum class State { idle, connecting, connected, closed } state_ = State::idle;
  Completion connect_done_;
  std::uint64_t sequence_ = 0;
  std::uint64_t subscription_counter_ = 0;
  std::uint64_t ping_counter_ = 0;
  std::uint64_t frames_sent_ = 0;
  bool reply_subscribed_ = false;
  std::map<std::string, Sub, std::less<>> subs_;
  std::map<std::uint64_t, PendingOp> ops_;
  std::map<std::string, PendingRequest, std::less<>> requests_;
  ErrorCallback on_error_;
};

}  // namespace acwp::client
