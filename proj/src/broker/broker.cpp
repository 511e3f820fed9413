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

#include "acwp/broker/broker.hpp"

#include <algorithm>
#include <chrono>

namespace acwp::broker {

using protocol::Document;
using protocol::Value;

namespace {

std::string broker_sender_id(std::string_view broker_id) {
  return "broker@" + std::string(broker_id);
}

std::optional<std::string> text_at(const Document& doc, std::string_view path) {
  const Value* v = doc.find(path);
  if (v == nullptr || v->kind() != protocol::ValueKind::text) return std::nullopt;
  return v->as_text();
}

}  // namespace

std::string_view dlq_reason_name(DlqReason reason) {
  return reason == DlqReason::ack_timeout ? "ack_timeout" : "client_disconnected";
}

Document DlqRecord::to_document() const {
  Document doc;
  doc.add("original_topic", Value::text(original_topic));
  doc.add("original_message_id", Value::text(original_message_id));
  doc.add("failed_subscription_id", Value::text(failed_subscription_id));
  doc.add("failed_client", Value::text(failed_client));
  doc.add("reason", Value::text(std::string(dlq_reason_name(reason))));
  const Document original_doc = protocol::envelope_to_document(original);
  for (const auto& [path, value] : original_doc.entries()) {
    doc.add("original." + path, value);
  }
  return protocol::canonicalize(std::move(doc));
}

std::optional<DlqRecord> DlqRecord::from_envelope(const Envelope& env) {
  if (env.message_type != kDlqMessageType) return std::nullopt;
  const Document& doc = env.payload;
  DlqRecord r;
  auto topic = text_at(doc, "original_topic");
  auto id = text_at(doc, "original_message_id");
  auto sub = text_at(doc, "failed_subscription_id");
  auto client = text_at(doc, "failed_client");
  auto reason = text_at(doc, "reason");
  if (!topic || !id || !sub || !client || !reason) return std::nullopt;
  r.original_topic = *topic;
  r.original_message_id = *id;
  r.failed_subscription_id = *sub;
  r.failed_client = *client;
  if (*reason == "ack_timeout") {
    r.reason = DlqReason::ack_timeout;
  } else if (*reason == "client_disconnected") {
    r.reason = DlqReason::client_disconnected;
  } else {
    return std::nullopt;
  }
  r.original = protocol::envelope_from_document(doc.subtree("original"));
  return r;
}

Broker::Broker(BrokerOptions options) : options_(std::move(options)) {
  if (!options_.clock) {
    options_.clock = [] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
  }
}

std::int64_t Broker::now() const { return options_.clock(); }

Status Broker::reject(std::string_view client, const Envelope* env, Status status) {
  if (observer_ != nullptr) observer_->on_reject(client, env, status);
  return status;
}

Status Broker::insert_topic(const TopicDescriptor& desc) {
  auto it = topics_.find(desc.name);
  if (it != topics_.end()) {
    if (it->second.descriptor == desc) return {};
    return {ErrorCode::already_declared,
            "topic '" + desc.name + "' already declared with different attributes"};
  }
  topics_.emplace(desc.name, TopicState{desc, {}, {}});
  return {};
}

Status Broker::declare_topic(const TopicDescriptor& desc) {
  if (!protocol::is_valid_topic_name(desc.name)) {
    return {ErrorCode::invalid_argument, "invalid topic name '" + desc.name + "'"};
  }
  if (is_dead_letter_name(desc.name) || desc.kind == TopicKind::dead_letter) {
    return {ErrorCode::reserved_suffix, "'.dlq' topics are created by the broker"};
  }
  if (desc.ack_deadline_ms <= 0) {
    return {ErrorCode::invalid_argument, "ack deadline must be positive"};
  }
  if (desc.kind != TopicKind::plain) {
    if (!desc.domain) return {ErrorCode::invalid_argument, "domain topic without a domain"};
    const std::string expected = desc.kind == TopicKind::contribution ? contribution_topic(*desc.domain)
                                 : desc.kind == TopicKind::publication
                                     ? publication_topic(*desc.domain)
                                     : rejection_topic(*desc.domain);
    if (desc.name != expected) {
      return {ErrorCode::invalid_argument, "topic '" + desc.name + "' must be named '" + expected + "'"};
    }
  }
  TopicDescriptor dlq = desc;
  dlq.name = dead_letter_topic(desc.name);
  dlq.kind = TopicKind::dead_letter;
  if (auto existing = topics_.find(desc.name); existing != topics_.end()) {
    return existing->second.descriptor == desc
               ? Status{}
               : Status{ErrorCode::already_declared,
                        "topic '" + desc.name + "' already declared with different attributes"};
  }
  if (topics_.contains(dlq.name)) {
    return {ErrorCode::already_declared, "topic '" + dlq.name + "' already exists"};
  }
  insert_topic(desc);
  insert_topic(dlq);
  return {};
}

Status Broker::declare_domain(std::string_view domain, std::int64_t ack_deadline_ms) {
  if (!protocol::is_valid_topic_name(domain)) {
    return {ErrorCode::invalid_argument, "invalid domain name '" + std::string(domain) + "'"};
  }
  if (domains_.contains(domain)) {
    return {ErrorCode::already_declared, "domain '" + std::string(domain) + "' already declared"};
  }
  const std::string d(domain);
  const TopicDescriptor descs[] = {
      {contribution_topic(d), TopicKind::contribution, TopicScope::global, ack_deadline_ms, d},
      {publication_topic(d), TopicKind::publication, TopicScope::global, ack_deadline_ms, d},
      {rejection_topic(d), TopicKind::rejection, TopicScope::global, ack_deadline_ms, d},
  };
  for (const auto& desc : descs) {
    if (topics_.contains(desc.name) || topics_.contains(dead_letter_topic(desc.name))) {
      return {ErrorCode::already_declared, "topic '" + desc.name + "' already exists"};
    }
  }
  for (const auto& desc : descs) {
    if (auto st = declare_topic(desc); !st) return st;
  }
  domains_.insert(d);
  return {};
}

Status Broker::connect(std::string_view client_id, ClientRole role) {
  if (!protocol::is_valid_client_id(client_id)) {
    return {ErrorCode::invalid_argument, "invalid client id '" + std::string(client_id) + "'"};
  }
  if (clients_.contains(client_id)) {
    return {ErrorCode::duplicate_client, "client '" + std::string(client_id) + "' already connected"};
  }
  clients_.emplace(std::string(client_id), ClientState{role, {}});
  if (role == ClientRole::component) {
    declare_topic({reply_topic(client_id), TopicKind::plain, TopicScope::local,
                   kDefaultAckDeadlineMs, std::nullopt});
  }
  return {};
}

std::vector<DlqRecord> Broker::disconnect(std::string_view client_id) {
  std::vector<DlqRecord> records;
  auto it = clients_.find(client_id);
  if (it == clients_.end()) return records;
  const std::set<std::string> subs = it->second.subscriptions;
  for (const auto& id : subs) remove_subscription(id, DlqReason::client_disconnected, records);
  for (auto o = owners_.begin(); o != owners_.end();) {
    o = o->second == client_id ? owners_.erase(o) : std::next(o);
  }
  clients_.erase(it);
  dead_letter(records);
  return records;
}

bool Broker::is_connected(std::string_view client_id) const { return clients_.contains(client_id); }

std::optional<ClientRole> Broker::role_of(std::string_view client_id) const {
  auto it = clients_.find(client_id);
  if (it == clients_.end()) return std::nullopt;
  return it->second.role;
}

Status Broker::register_owner(std::string_view client_id, std::string_view domain) {
  if (!clients_.contains(client_id)) {
    return {ErrorCode::unknown_client, "client '" + std::string(client_id) + "' not connected"};
  }
  if (!domains_.contains(domain)) {
    return {ErrorCode::unknown_domain, "domain '" + std::string(domain) + "' not declared"};
  }
  if (auto it = owners_.find(domain); it != owners_.end()) {
    if (it->second == client_id) return {};
    return {ErrorCode::already_owned,
            "domain '" + std::string(domain) + "' is owned by '" + it->second + "'"};
  }
  owners_.emplace(std::string(domain), std::string(client_id));
  const std::string sub_id = owner_subscription_id(client_id, domain);
  if (!subscriptions_.contains(sub_id)) {
    if (auto st = add_subscription(client_id, contribution_topic(domain), sub_id); !st) {
      owners_.erase(std::string(domain));
      return st;
    }
  }
  return {};
}

std::optional<std::string> Broker::owner(std::string_view domain) const {
  auto it = owners_.find(domain);
  if (it == owners_.end()) return std::nullopt;
  return it->second;
}

Status Broker::add_subscription(std::string_view client, std::string_view topic,
                                std::string_view subscription_id) {
  auto& t = topics_.find(topic)->second;
  Subscription sub{std::string(subscription_id), std::string(client), std::string(topic),
                   subscription_seq_++, {}};
  subscriptions_.emplace(sub.id, std::move(sub));
  t.subscriptions.emplace_back(subscription_id);
  clients_.find(client)->second.subscriptions.emplace(subscription_id);
  return {};
}

Status Broker::subscribe(std::string_view client_id, std::string_view topic,
                         std::string_view subscription_id) {
  auto client = clients_.find(client_id);
  if (client == clients_.end()) {
    return {ErrorCode::unknown_client, "client '" + std::string(client_id) + "' not connected"};
  }
  auto t = topics_.find(topic);
  if (t == topics_.end()) {
    return {ErrorCode::unknown_topic, "unknown topic '" + std::string(topic) + "'"};
  }
  const auto& desc = t->second.descriptor;
  if (desc.kind == TopicKind::contribution && client->second.role != ClientRole::bridge) {
    auto o = owners_.find(*desc.domain);
    if (o == owners_.end() || o->second != client_id) {
      return {ErrorCode::ownership_violation,
              "only the owner of '" + *desc.domain + "' may subscribe to '" + desc.name + "'"};
    }
  }
  if (subscription_id.empty() ||
      subscription_id.find_first_of(" \t\n,") != std::string_view::npos) {
    return {ErrorCode::invalid_argument, "invalid subscription id"};
  }
  if (subscriptions_.contains(subscription_id)) {
    return {ErrorCode::duplicate_subscription,
            "subscription id '" + std::string(subscription_id) + "' already in use"};
  }
  return add_subscription(client_id, topic, subscription_id);
}

void Broker::remove_subscription(const std::string& subscription_id, DlqReason reason,
                                 std::vector<DlqRecord>& out) {
  auto it = subscriptions_.find(subscription_id);
  if (it == subscriptions_.end()) return;
  Subscription& sub = it->second;

  // Queued-but-undelivered and delivered-but-unacked messages are both in
  // flight for this subscription; interleave them by publish order.
  std::vector<std::pair<std::uint64_t, std::shared_ptr<const Envelope>>> in_flight;
  for (const auto& p : sub.pending) in_flight.emplace_back(p.publish_seq, p.envelope);
  for (auto q = outbox_.begin(); q != outbox_.end();) {
    if (q->subscription_id == subscription_id) {
      in_flight.emplace_back(q->publish_seq, q->envelope);
      q = outbox_.erase(q);
    } else {
      ++q;
    }
  }
  std::stable_sort(in_flight.begin(), in_flight.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [seq, env] : in_flight) {
    out.push_back({env->topic, env->message_id, sub.id, sub.client, reason, *env});
  }

  auto& topic_subs = topics_.find(sub.topic)->second.subscriptions;
  topic_subs.erase(std::remove(topic_subs.begin(), topic_subs.end(), subscription_id),
                   topic_subs.end());
  if (auto c = clients_.find(sub.client); c != clients_.end()) {
    c->second.subscriptions.erase(subscription_id);
  }
  subscriptions_.erase(it);
}

Status Broker::unsubscribe(std::string_view client_id, std::string_view subscription_id,
                           std::vector<DlqRecord>* dead_lettered) {
  auto it = subscriptions_.find(subscription_id);
  if (it == subscriptions_.end() || it->second.client != client_id) {
    return {ErrorCode::unknown_subscription,
            "unknown subscription '" + std::string(subscription_id) + "'"};
  }
  std::vector<DlqRecord> records;
  remove_subscription(std::string(subscription_id), DlqReason::client_disconnected, records);
  dead_letter(records);
  if (dead_lettered != nullptr) *dead_lettered = std::move(records);
  return {};
}

Status Broker::publish(std::string_view client_id, Envelope env) {
  auto client = clients_.find(client_id);
  if (client == clients_.end()) {
    return reject(client_id, &env,
                  {ErrorCode::unknown_client, "client '" + std::string(client_id) + "' not connected"});
  }
  const bool bridge = client->second.role == ClientRole::bridge;
  if (auto why = protocol::check_envelope(env); !why.empty()) {
    return reject(client_id, &env, {ErrorCode::protocol_error, why});
  }
  if (bridge) {
    if (env.hop_trace.empty() || env.hop_trace.back() != id()) {
      return reject(client_id, &env,
                    {ErrorCode::protocol_error, "relayed hop-trace must end with '" + id() + "'"});
    }
  } else {
    if (env.sender_id != client_id) {
      return reject(client_id, &env, {ErrorCode::protocol_error, "sender-id must equal client id"});
    }
    if (!env.hop_trace.empty()) {
      return reject(client_id, &env, {ErrorCode::protocol_error, "components may not set hop-trace"});
    }
  }
  auto t = topics_.find(env.topic);
  if (t == topics_.end()) {
    return reject(client_id, &env, {ErrorCode::unknown_topic, "unknown topic '" + env.topic + "'"});
  }
  const auto& desc = t->second.descriptor;
  if (!bridge) {
    if (desc.kind == TopicKind::publication || desc.kind == TopicKind::rejection) {
      auto o = owners_.find(*desc.domain);
      if (o == owners_.end() || o->second != client_id) {
        return reject(client_id, &env,
                      {ErrorCode::ownership_violation,
                       "only the owner of '" + *desc.domain + "' may publish to '" + desc.name + "'"});
      }
    } else if (desc.kind == TopicKind::dead_letter) {
      return reject(client_id, &env,
                    {ErrorCode::ownership_violation, "dead-letter topics are written by the broker"});
    }
  }
  // Dead-letter payloads embed arbitrary originals and are produced by brokers.
  if (options_.schemas && desc.kind != TopicKind::dead_letter) {
    if (options_.schemas->latest(env.message_type) == nullptr) {
      return reject(client_id, &env,
                    {ErrorCode::unknown_message_type, "unknown message type '" + env.message_type + "'"});
    }
    auto violations = protocol::validate(env.payload, env.message_type, *options_.schemas,
                                         options_.validation);
    if (!violations.empty()) {
      return reject(client_id, &env,
                    {ErrorCode::schema_violation,
                     std::to_string(violations.size()) + " schema violation(s) in " + env.message_type,
                     protocol::violation_lines(violations)});
    }
  }
  if (!bridge) env.hop_trace.push_back(id());
  auto shared = std::make_shared<const Envelope>(std::move(env));
  if (observer_ != nullptr) observer_->on_accept(client_id, *shared);
  enqueue(t->second, std::move(shared));
  return {};
}

void Broker::enqueue(TopicState& topic, std::shared_ptr<const Envelope> env) {
  ++topic.stats.published;
  const auto seq = publish_seq_++;
  if (topic.subscriptions.empty()) {
    ++topic.stats.dropped;
    if (observer_ != nullptr) observer_->on_drop(*env);
    return;
  }
  for (const auto& sub : topic.subscriptions) outbox_.push_back({sub, env, seq});
}

std::vector<Delivery> Broker::dispatch(std::int64_t now_ms) {
  std::vector<Delivery> out;
  out.reserve(outbox_.size());
  while (!outbox_.empty()) {
    Queued q = std::move(outbox_.front());
    outbox_.pop_front();
    auto it = subscriptions_.find(q.subscription_id);
    if (it == subscriptions_.end()) continue;
    Subscription& sub = it->second;
    auto& topic = topics_.find(sub.topic)->second;
    const std::int64_t deadline = now_ms + topic.descriptor.ack_deadline_ms;
    sub.pending.push_back({q.envelope, deadline, q.publish_seq});
    ++topic.stats.delivered;
    out.push_back({sub.client, sub.id, *q.envelope, deadline});
    if (observer_ != nullptr) observer_->on_deliver(out.back());
  }
  return out;
}

Status Broker::ack(std::string_view client_id, std::string_view subscription_id,
                   std::string_view message_id) {
  auto it = subscriptions_.find(subscription_id);
  if (it != subscriptions_.end() && it->second.client == client_id) {
    auto& pending = it->second.pending;
    auto p = std::find_if(pending.begin(), pending.end(),
                          [&](const Pending& e) { return e.envelope->message_id == message_id; });
    if (p != pending.end()) {
      pending.erase(p);
      ++topics_.find(it->second.topic)->second.stats.acked;
      if (observer_ != nullptr) observer_->on_ack(client_id, subscription_id, message_id, true);
      return {};
    }
  }
  if (observer_ != nullptr) observer_->on_ack(client_id, subscription_id, message_id, false);
  return {ErrorCode::unknown_pending,
          "no pending delivery of '" + std::string(message_id) + "' on '" +
              std::string(subscription_id) + "'"};
}

std::vector<DlqRecord> Broker::sweep_deadlines(std::int64_t now_ms) {
  struct Expired {
    std::uint64_t publish_seq;
    std::uint64_t sub_seq;
    DlqRecord record;
  };
  std::vector<Expired> expired;
  for (auto& [id, sub] : subscriptions_) {
    for (auto p = sub.pending.begin(); p != sub.pending.end();) {
      if (p->deadline_ms < now_ms) {
        const auto& env = *p->envelope;
        expired.push_back({p->publish_seq, sub.seq,
                           {env.topic, env.message_id, sub.id, sub.client, DlqReason::ack_timeout, env}});
        p = sub.pending.erase(p);
      } else {
        ++p;
      }
    }
  }
  std::sort(expired.begin(), expired.end(), [](const Expired& a, const Expired& b) {
    return std::tie(a.publish_seq, a.sub_seq) < std::tie(b.publish_seq, b.sub_seq);
  });
  std::vector<DlqRecord> records;
  records.reserve(expired.size());
  for (auto& e : expired) records.push_back(std::move(e.record));
  dead_letter(records);
  return records;
}

void Broker::dead_letter(std::vector<DlqRecord>& records) {
  // Expired deliveries from a dead-letter topic have no sibling to go to;
  // they are counted as dropped and not reported as records.
  std::vector<DlqRecord> kept;
  kept.reserve(records.size());
  for (auto& r : records) {
    auto& source = topics_.find(r.original_topic)->second;
    if (source.descriptor.kind == TopicKind::dead_letter) {
      ++source.stats.dropped;
      continue;
    }
    ++source.stats.dead_lettered;
    if (observer_ != nullptr) observer_->on_dead_letter(r);

    Envelope env;
    env.topic = dead_letter_topic(r.original_topic);
    env.sender_id = broker_sender_id(id());
    env.message_id = protocol::make_message_id(env.sender_id, ++dlq_seq_);
    env.message_type = std::string(kDlqMessageType);
    env.timestamp_ms = now();
    env.correlation_id = r.original_message_id;
    env.hop_trace = {id()};
    env.payload = r.to_document();
    auto shared = std::make_shared<const Envelope>(std::move(env));
    if (observer_ != nullptr) observer_->on_accept(shared->sender_id, *shared);
    auto& dlq = topics_.find(shared->topic)->second;
    enqueue(dlq, std::move(shared));
    kept.push_back(std::move(r));
  }
  records = std::move(kept);
}

std::vector<TopicInfo> Broker::list_topics() const {
  std::vector<TopicInfo> out;
  out.reserve(topics_.size());
  for (const auto& [name, t] : topics_) {
    TopicInfo info{t.descriptor, t.stats, t.subscriptions.size(), std::nullopt};
    if (t.descriptor.domain && t.descriptor.kind != TopicKind::plain) info.owner = owner(*t.descriptor.domain);
    out.push_back(std::move(info));
  }
  return out;
}

std::optional<TopicDescriptor> Broker::topic(std::string_view name) const {
  auto it = topics_.find(name);
  if (it == topics_.end()) return std::nullopt;
  return it->second.descriptor;
}

TopicStats Broker::stats(std::string_view topic) const {
  auto it = topics_.find(topic);
  return it == topics_.end() ? TopicStats{} : it->second.stats;
}

TopicStats Broker::totals() const {
  TopicStats sum;
  for (const auto& [name, t] : topics_) {
    sum.published += t.stats.published;
    sum.delivered += t.stats.delivered;
    sum.acked += t.stats.acked;
    sum.dead_lettered += t.stats.dead_lettered;
    sum.dropped += t.stats.dropped;
  }
  return sum;
}

std::optional<std::int64_t> Broker::next_deadline() const {
  std::optional<std::int64_t> best;
  for (const auto& [id, sub] : subscriptions_) {
    for (const auto& p : sub.pending) {
      if (!best || p.deadline_ms < *best) best = p.deadline_ms;
    }
  }
  return best;
}

std::size_t Broker::pending_count() const {
  std::size_t n = 0;
  for (const auto& [id, sub] : subscriptions_) n += sub.pending.size();
  return n;
}

}  // namespace acwp::broker
