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
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "acwp/broker/topic.hpp"
#include "acwp/protocol/envelope.hpp"
#include "acwp/protocol/schema.hpp"
#include "acwp/status.hpp"

namespace acwp::broker {

using protocol::Envelope;

/// Bridges are trusted relays: exempt from ownership checks and allowed to
/// publish envelopes that keep their original sender and hop trace.
enum class ClientRole { component, bridge };

enum class DlqReason { ack_timeout, client_disconnected };
std::string_view dlq_reason_name(DlqReason reason);

inline constexpr std::string_view kDlqMessageType = "dlq.record";

/// One failed (message, subscription) pair.
struct DlqRecord {
  std::string original_topic;
  std::string original_message_id;
  std::string failed_subscription_id;
  std::string failed_client;
  DlqReason reason = DlqReason::ack_timeout;
  Envelope original;

  /// Payload published on `<topic>.dlq`: the record fields plus the original
  /// envelope embedded under `original.`.
  protocol::Document to_document() const;
  static std::optional<DlqRecord> from_envelope(const Envelope& dlq_envelope);

  friend bool operator==(const DlqRecord&, const DlqRecord&) = default;
};

struct Delivery {
  std::string client_id;
  std::string subscription_id;
  Envelope envelope;
  std::int64_t deadline_ms = 0;
};

struct TopicStats {
  std::uint64_t published = 0;
  std::uint64_t delivered = 0;
  std::uint64_t acked = 0;
  std::uint64_t dead_lettered = 0;
  std::uint64_t dropped = 0;

  friend bool operator==(const TopicStats&, const TopicStats&) = default;
};

struct TopicInfo {
  TopicDescriptor descriptor;
  TopicStats stats;
  std::size_t subscriptions = 0;
  std::optional<std::string> owner;
};

/// Hooks for logging. Called synchronously from the mutating operation.
class BrokerObserver {
 public:
  virtual ~BrokerObserver() = default;
  virtual void on_accept(std::string_view /*client*/, const Envelope& /*env*/) {}
  virtual void on_reject(std::string_view /*client*/, const Envelope* /*env*/,
                         const Status& /*status*/) {}
  virtual void on_drop(const Envelope& /*env*/) {}
  virtual void on_deliver(const Delivery& /*delivery*/) {}
  virtual void on_ack(std::string_view /*client*/, std::string_view /*subscription_id*/,
                      std::string_view /*message_id*/, bool /*known*/) {}
  virtual void on_dead_letter(const DlqRecord& /*record*/) {}
};

struct BrokerOptions {
  std::string id;
  std::shared_ptr<const protocol::SchemaSet> schemas;  // null disables validation
  protocol::ValidationMode validation = protocol::ValidationMode::strict;
  /// Milliseconds since epoch; used to timestamp dead-letter envelopes.
  std::function<std::int64_t()> clock;
};

/// Single broker instance. Not thread-safe: callers serialize every command
/// through one point (the server holds a mutex, the simulation is
/// single-threaded).
class Broker {
 public:
  explicit Broker(BrokerOptions options);

  const std::string& id() const { return options_.id; }
  const BrokerOptions& options() const { return options_; }
  void set_observer(BrokerObserver* observer) { observer_ = observer; }

  /// Creates the topic and its `.dlq` sibling. Re-declaring an identical
  /// descriptor is a no-op.
  Status declare_topic(const TopicDescriptor& desc);
  /// Creates `<domain>.contribution|publication|rejection` with dlq siblings.
  Status declare_domain(std::string_view domain,
                        std::int64_t ack_deadline_ms = kDefaultAckDeadlineMs);

  /// Components get a local-scope reply topic `_reply.<client>` declared.
  Status connect(std::string_view client_id, ClientRole role = ClientRole::component);
  /// Drops every subscription of the client, dead-letters its in-flight
  /// messages (reason client_disconnected) and releases its domains.
  std::vector<DlqRecord> disconnect(std::string_view client_id);
  bool is_connected(std::string_view client_id) const;
  std::optional<ClientRole> role_of(std::string_view client_id) const;

  /// Records ownership and subscribes the owner to `<domain>.contribution`
  /// under owner_subscription_id().
  Status register_owner(std::string_view client_id, std::string_view domain);
  std::optional<std::string> owner(std::string_view domain) const;

  Status subscribe(std::string_view client_id, std::string_view topic,
                   std::string_view subscription_id);
  Status unsubscribe(std::string_view client_id, std::string_view subscription_id,
                     std::vector<DlqRecord>* dead_lettered = nullptr);

  /// Validates and enqueues to every current subscription of the topic.
  /// Returns as soon as the message is queued; never waits on subscribers.
  Status publish(std::string_view client_id, Envelope env);

  /// Moves every queued message to its subscriber and starts its ack clock.
  std::vector<Delivery> dispatch(std::int64_t now_ms);
  Status ack(std::string_view client_id, std::string_view subscription_id,
             std::string_view message_id);
  /// Dead-letters every pending delivery whose deadline is before `now_ms`.
  std::vector<DlqRecord> sweep_deadlines(std::int64_t now_ms);

  std::vector<TopicInfo> list_topics() const;
  std::optional<TopicDescriptor> topic(std::string_view name) const;
  TopicStats stats(std::string_view topic) const;
  TopicStats totals() const;

  std::optional<std::int64_t> next_deadline() const;
  std::size_t pending_count() const;
  std::size_t queued_count() const { return outbox_.size(); }

 private:
  struct Pending {
    std::shared_ptr<const Envelope> envelope;
    std::int64_t deadline_ms;
    std::uint64_t publish_seq;
  };
  struct Subscription {
    std::string id;
    std::string client;
    std::string topic;
    std::uint64_t seq;
    std::deque<Pending> pending;
  };
  struct Queued {
    std::string subscription_id;
    std::shared_ptr<const Envelope> envelope;
    std::uint64_t publish_seq;
  };
  struct TopicState {
    TopicDescriptor descriptor;
    TopicStats stats;
    std::vector<std::string> subscriptions;  // in subscribe order
  };
  struct ClientState {
    ClientRole role;
    std::set<std::string> subscriptions;
  };

  Status reject(std::string_view client, const Envelope* env, Status status);
  Status insert_topic(const TopicDescriptor& desc);
  Status add_subscription(std::string_view client, std::string_view topic,
                          std::string_view subscription_id);
  void remove_subscription(const std::string& subscription_id, DlqReason reason,
                           std::vector<DlqRecord>& out);
  void enqueue(TopicState& topic, std::shared_ptr<const Envelope> env);
  void dead_letter(std::vector<DlqRecord>& records);
  std::int64_t now() const;

  BrokerOptions options_;
  BrokerObserver* observer_ = nullptr;
  std::map<std::string, TopicState, std::less<>> topics_;
  std::map<std::string, std::string, std::less<>> owners_;  // domain -> client
  std::set<std::string, std::less<>> domains_;
  std::map<std::string, ClientState, std::less<>> clients_;
  std::map<std::string, Subscription, std::less<>> subscriptions_;
  std::deque<Queued> outbox_;
  std::uint64_t publish_seq_ = 0;
  std::uint64_t subscription_seq_ = 0;
  std::uint64_t dlq_seq_ = 0;
};

}  // namespace acwp::broker
