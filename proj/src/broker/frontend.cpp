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

#include "acwp/broker/frontend.hpp"

#include "acwp/protocol/envelope.hpp"

namespace acwp::broker {

using protocol::Command;
using protocol::Document;
using protocol::Frame;
using protocol::Value;

namespace {

std::string header_or_empty(const Frame& f, std::string_view name) {
  auto v = f.header(name);
  return v ? std::string(*v) : std::string();
}

std::int64_t int_at(const Document& doc, const std::string& path) {
  const Value* v = doc.find(path);
  return v != nullptr && v->kind() == protocol::ValueKind::integer ? v->as_integer() : 0;
}

std::optional<std::string> text_at(const Document& doc, const std::string& path) {
  const Value* v = doc.find(path);
  if (v == nullptr || v->kind() != protocol::ValueKind::text) return std::nullopt;
  return v->as_text();
}

}  // namespace

Frontend::Frontend(Broker& broker, std::string role) : broker_(broker), role_(std::move(role)) {}

std::optional<std::string> Frontend::client_of(ConnectionId conn) const {
  auto it = clients_.find(conn);
  if (it == clients_.end()) return std::nullopt;
  return it->second;
}

void Frontend::error(ConnectionId conn, const Status& status, std::vector<Outbound>& out,
                     std::map<std::string, std::string> context, bool close) {
  Frame f;
  f.command = Command::error;
  f.set("error-code", std::string(error_code_name(status.code())));
  if (!status.message().empty()) f.set("message", status.message());
  for (auto& [k, v] : context) f.set(k, std::move(v));
  for (const auto& line : status.violations()) {
    f.body += line;
    f.body += '\n';
  }
  out.push_back({conn, std::move(f), close});
}

void Frontend::dispatch(std::int64_t now_ms, std::vector<Outbound>& out) {
  for (auto& d : broker_.dispatch(now_ms)) {
    auto conn = connections_.find(d.client_id);
    if (conn == connections_.end()) continue;
    out.push_back({conn->second,
                   protocol::envelope_to_frame(d.envelope, Command::message, d.subscription_id)});
  }
}

std::vector<Outbound> Frontend::protocol_failure(ConnectionId conn,
                                                 const protocol::ProtocolError& e) {
  std::vector<Outbound> out;
  error(conn, {ErrorCode::protocol_error, e.what()}, out, {}, true);
  return out;
}

std::vector<Outbound> Frontend::handle(ConnectionId conn, const Frame& frame, std::int64_t now_ms) {
  std::vector<Outbound> out;
  auto bound = clients_.find(conn);

  if (frame.command == Command::connect) {
    if (bound != clients_.end()) {
      error(conn, {ErrorCode::protocol_error, "already connected"}, out);
      return out;
    }
    const std::string client = header_or_empty(frame, "client-id");
    const auto role = frame.header("role") == std::optional<std::string_view>("bridge")
                          ? ClientRole::bridge
                          : ClientRole::component;
    if (auto st = broker_.connect(client, role); !st) {
      error(conn, st, out, {{"client-id", client}}, true);
      return out;
    }
    clients_[conn] = client;
    connections_[client] = conn;
    Frame reply;
    reply.command = Command::connected;
    reply.set("client-id", client).set("broker-id", broker_.id()).set("broker-role", role_);
    out.push_back({conn, std::move(reply)});
    return out;
  }
  if (frame.command == Command::ping) {
    Frame pong;
    pong.command = Command::pong;
    if (auto id = frame.header("ping-id")) pong.set("ping-id", std::string(*id));
    if (frame.header("info") == std::optional<std::string_view>("topics")) {
      pong.body = protocol::encode_document(topics_document(broker_, role_));
    }
    out.push_back({conn, std::move(pong)});
    return out;
  }
  if (bound == clients_.end()) {
    error(conn, {ErrorCode::protocol_error, "CONNECT required first"}, out, {}, true);
    return out;
  }
  const std::string& client = bound->second;

  switch (frame.command) {
    case Command::subscribe: {
      const std::string sub = header_or_empty(frame, "subscription-id");
      if (auto st = broker_.subscribe(client, header_or_empty(frame, "topic"), sub); !st) {
        error(conn, st, out, {{"subscription-id", sub}});
      }
      break;
    }
    case Command::unsubscribe: {
      const std::string sub = header_or_empty(frame, "subscription-id");
      if (auto st = broker_.unsubscribe(client, sub); !st) {
        error(conn, st, out, {{"subscription-id", sub}});
      }
      break;
    }
    case Command::own: {
      const std::string domain = header_or_empty(frame, "domain");
      if (auto st = broker_.register_owner(client, domain); !st) {
        error(conn, st, out, {{"domain", domain}});
      }
      break;
    }
    case Command::publish: {
      const std::string ref = header_or_empty(frame, "message-id");
      try {
        auto env = protocol::frame_to_envelope(frame);
        if (auto st = broker_.publish(client, std::move(env)); !st) {
          error(conn, st, out, {{"ref-message-id", ref}});
        }
      } catch (const protocol::ProtocolError& e) {
        error(conn, {ErrorCode::protocol_error, e.what()}, out, {{"ref-message-id", ref}});
      }
      break;
    }
    case Command::ack:
      // Late or duplicate acks are benign; the observer records them.
      broker_.ack(client, header_or_empty(frame, "subscription-id"),
                  header_or_empty(frame, "message-id"));
      break;
    case Command::disconnect: {
      broker_.disconnect(client);
      connections_.erase(client);
      clients_.erase(bound);
      dispatch(now_ms, out);
      out.push_back({conn, Frame{Command::pong, {{"ping-id", "disconnect"}}, {}}, true});
      return out;
    }
    default:
      error(conn,
            {ErrorCode::protocol_error,
             "unexpected " + std::string(protocol::command_name(frame.command)) + " from client"},
            out);
      break;
  }
  dispatch(now_ms, out);
  return out;
}

std::vector<Outbound> Frontend::connection_closed(ConnectionId conn, std::int64_t now_ms) {
  std::vector<Outbound> out;
  auto it = clients_.find(conn);
  if (it == clients_.end()) return out;
  broker_.disconnect(it->second);
  connections_.erase(it->second);
  clients_.erase(it);
  dispatch(now_ms, out);
  return out;
}

std::vector<Outbound> Frontend::tick(std::int64_t now_ms) {
  std::vector<Outbound> out;
  broker_.sweep_deadlines(now_ms);
  dispatch(now_ms, out);
  return out;
}

Document topics_document(const Broker& broker, std::string_view role) {
  Document doc;
  doc.add("broker_id", Value::text(broker.id()));
  doc.add("role", Value::text(std::string(role)));
  std::size_t i = 0;
  for (const auto& info : broker.list_topics()) {
    const std::string p = "topics." + std::to_string(i++) + ".";
    const auto& d = info.descriptor;
    doc.add(p + "name", Value::text(d.name));
    doc.add(p + "kind", Value::text(std::string(topic_kind_name(d.kind))));
    doc.add(p + "scope", Value::text(std::string(topic_scope_name(d.scope))));
    doc.add(p + "ack_deadline_ms", Value::integer(d.ack_deadline_ms));
    if (d.domain) doc.add(p + "domain", Value::text(*d.domain));
    if (info.owner) doc.add(p + "owner", Value::text(*info.owner));
    doc.add(p + "subscriptions", Value::integer(static_cast<std::int64_t>(info.subscriptions)));
    doc.add(p + "published", Value::integer(static_cast<std::int64_t>(info.stats.published)));
    doc.add(p + "delivered", Value::integer(static_cast<std::int64_t>(info.stats.delivered)));
    doc.add(p + "acked", Value::integer(static_cast<std::int64_t>(info.stats.acked)));
    doc.add(p + "dead_lettered", Value::integer(static_cast<std::int64_t>(info.stats.dead_lettered)));
    doc.add(p + "dropped", Value::integer(static_cast<std::int64_t>(info.stats.dropped)));
  }
  return protocol::canonicalize(std::move(doc));
}

std::vector<TopicInfo> parse_topics_document(const Document& doc) {
  std::vector<TopicInfo> out;
  for (std::size_t i = 0;; ++i) {
    const std::string p = "topics." + std::to_string(i) + ".";
    auto name = text_at(doc, p + "name");
    if (!name) break;
    TopicInfo info;
    info.descriptor.name = *name;
    info.descriptor.kind = topic_kind_from_name(text_at(doc, p + "kind").value_or("plain"))
                               .value_or(TopicKind::plain);
    info.descriptor.scope = topic_scope_from_name(text_at(doc, p + "scope").value_or("global"))
                                .value_or(TopicScope::global);
    info.descriptor.ack_deadline_ms = int_at(doc, p + "ack_deadline_ms");
    info.descriptor.domain = text_at(doc, p + "domain");
    info.owner = text_at(doc, p + "owner");
    info.subscriptions = static_cast<std::size_t>(int_at(doc, p + "subscriptions"));
    info.stats.published = static_cast<std::uint64_t>(int_at(doc, p + "published"));
    info.stats.delivered = static_cast<std::uint64_t>(int_at(doc, p + "delivered"));
    info.stats.acked = static_cast<std::uint64_t>(int_at(doc, p + "acked"));
    info.stats.dead_lettered = static_cast<std::uint64_t>(int_at(doc, p + "dead_lettered"));
    info.stats.dropped = static_cast<std::uint64_t>(int_at(doc, p + "dropped"));
    out.push_back(std::move(info));
  }
  return out;
}

}  // namespace acwp::broker
