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

#include "acwp/protocol/envelope.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "acwp/protocol/errors.hpp"

namespace acwp::protocol {
namespace {

bool is_topic_segment(std::string_view s) {
  if (s.empty() || s.front() == '-') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::string_view required(const Frame& f, std::string_view name) {
  auto v = f.header(name);
  if (!v) {
    throw ProtocolError(ErrorKind::missing_header, "missing header '" + std::string(name) + "'",
                        0, std::string(name));
  }
  return *v;
}

std::optional<std::string> optional_text(const Document& doc, std::string_view path) {
  const Value* v = doc.find(path);
  if (v == nullptr || v->kind() != ValueKind::text) return std::nullopt;
  return v->as_text();
}

}  // namespace

std::string make_message_id(std::string_view sender_id, std::uint64_t sequence) {
  return std::string(sender_id) + ":" + std::to_string(sequence);
}

bool is_valid_topic_name(std::string_view name) {
  if (name.empty()) return false;
  std::size_t start = 0;
  while (true) {
    const auto dot = name.find('.', start);
    const auto seg = name.substr(start, dot == std::string_view::npos ? name.npos : dot - start);
    if (!is_topic_segment(seg)) return false;
    if (dot == std::string_view::npos) return true;
    start = dot + 1;
  }
}

bool is_valid_client_id(std::string_view id) {
  return is_valid_topic_name(id) && id.front() != '_';
}

std::string check_envelope(const Envelope& env) {
  if (!is_valid_topic_name(env.topic)) return "invalid topic name '" + env.topic + "'";
  if (env.sender_id.empty()) return "empty sender-id";
  if (env.message_type.empty()) return "empty message-type";
  const std::string prefix = env.sender_id + ":";
  if (env.message_id.size() <= prefix.size() ||
      env.message_id.compare(0, prefix.size(), prefix) != 0) {
    return "message-id '" + env.message_id + "' does not follow <sender-id>:<sequence>";
  }
  const auto seq = std::string_view(env.message_id).substr(prefix.size());
  if (!std::all_of(seq.begin(), seq.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return "message-id sequence is not a number";
  }
  std::set<std::string_view> seen;
  for (const auto& hop : env.hop_trace) {
    if (hop.empty() || !seen.insert(hop).second) return "hop-trace contains a repeated broker id";
  }
  return {};
}

std::string join_hop_trace(const std::vector<std::string>& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i > 0) out += ',';
    out += trace[i];
  }
  return out;
}

std::vector<std::string> split_hop_trace(std::string_view header) {
  std::vector<std::string> out;
  if (header.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = header.find(',', start);
    out.emplace_back(header.substr(start, comma == std::string_view::npos ? header.npos
                                                                          : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Frame envelope_to_frame(const Envelope& env, Command command, std::string_view subscription_id) {
  Frame f;
  f.command = command;
  f.set("topic", env.topic);
  f.set("message-id", env.message_id);
  f.set("sender-id", env.sender_id);
  f.set("message-type", env.message_type);
  f.set("timestamp", std::to_string(env.timestamp_ms));
  if (env.correlation_id) f.set("correlation-id", *env.correlation_id);
  if (env.reply_to) f.set("reply-to", *env.reply_to);
  if (!env.hop_trace.empty() || command == Command::message) {
    f.set("hop-trace", join_hop_trace(env.hop_trace));
  }
  if (command == Command::message) f.set("subscription-id", std::string(subscription_id));
  f.body = encode_document(env.payload);
  return f;
}

Envelope frame_to_envelope(const Frame& frame) {
  Envelope env;
  env.topic = required(frame, "topic");
  env.message_id = required(frame, "message-id");
  env.sender_id = required(frame, "sender-id");
  env.message_type = required(frame, "message-type");
  const auto ts = required(frame, "timestamp");
  auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), env.timestamp_ms);
  if (ec != std::errc() || ptr != ts.data() + ts.size()) {
    throw ProtocolError(ErrorKind::syntax, "bad timestamp '" + std::string(ts) + "'", 0,
                        "timestamp");
  }
  if (auto v = frame.header("correlation-id")) env.correlation_id = std::string(*v);
  if (auto v = frame.header("reply-to")) env.reply_to = std::string(*v);
  if (auto v = frame.header("hop-trace")) env.hop_trace = split_hop_trace(*v);
  env.payload = parse_document(frame.body);
  return env;
}

Document envelope_to_document(const Envelope& env) {
  Document doc;
  doc.add("topic", Value::text(env.topic));
  doc.add("message_id", Value::text(env.message_id));
  doc.add("sender_id", Value::text(env.sender_id));
  doc.add("message_type", Value::text(env.message_type));
  doc.add("timestamp", Value::integer(env.timestamp_ms));
  if (env.correlation_id) doc.add("correlation_id", Value::text(*env.correlation_id));
  if (env.reply_to) doc.add("reply_to", Value::text(*env.reply_to));
  for (std::size_t i = 0; i < env.hop_trace.size(); ++i) {
    doc.add("hop_trace." + std::to_string(i), Value::text(env.hop_trace[i]));
  }
  for (const auto& [path, value] : env.payload.entries()) doc.add("payload." + path, value);
  return canonicalize(std::move(doc));
}

Envelope envelope_from_document(const Document& doc) {
  Envelope env;
  env.topic = optional_text(doc, "topic").value_or("");
  env.message_id = optional_text(doc, "message_id").value_or("");
  env.sender_id = optional_text(doc, "sender_id").value_or("");
  env.message_type = optional_text(doc, "message_type").value_or("");
  if (const Value* ts = doc.find("timestamp"); ts && ts->kind() == ValueKind::integer) {
    env.timestamp_ms = ts->as_integer();
  }
  env.correlation_id = optional_text(doc, "correlation_id");
  env.reply_to = optional_text(doc, "reply_to");
  for (std::size_t i = 0;; ++i) {
    auto hop = optional_text(doc, "hop_trace." + std::to_string(i));
    if (!hop) break;
    env.hop_trace.push_back(std::move(*hop));
  }
  env.payload = doc.subtree("payload");
  return env;
}

}  // namespace acwp::protocol
