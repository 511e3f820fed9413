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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acwp/protocol/document.hpp"
#include "acwp/protocol/frame.hpp"

namespace acwp::protocol {

/// A routed message: header fields plus a Document payload.
struct Envelope {
  std::string topic;
  std::string message_id;
  std::string sender_id;
  std::string message_type;
  std::int64_t timestamp_ms = 0;
  std::optional<std::string> correlation_id;
  std::optional<std::string> reply_to;
  std::vector<std::string> hop_trace;
  Document payload;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// `<sender_id>:<sequence>`.
std::string make_message_id(std::string_view sender_id, std::uint64_t sequence);

/// Lowercase dot-separated topic name; segments `[a-z0-9_][a-z0-9_-]*`.
bool is_valid_topic_name(std::string_view name);
/// Client and broker ids: a topic-style name that does not start with '_'
/// and contains no '@', ':' or ','.
bool is_valid_client_id(std::string_view id);

/// Checks the message-id scheme and hop-trace uniqueness. Returns an empty
/// string when well formed, otherwise the reason.
std::string check_envelope(const Envelope& env);

std::string join_hop_trace(const std::vector<std::string>& trace);
std::vector<std::string> split_hop_trace(std::string_view header);

/// Maps envelope fields to headers and the payload to its canonical body.
/// `command` is PUBLISH or MESSAGE; MESSAGE frames also carry the
/// subscription id.
Frame envelope_to_frame(const Envelope& env, Command command = Command::publish,
                        std::string_view subscription_id = {});

/// Throws ProtocolError(missing_header) naming the absent header, or
/// ProtocolError(syntax) for a bad timestamp or body.
Envelope frame_to_envelope(const Frame& frame);

/// Flat document view of an envelope, used for printing and for embedding:
/// `topic`, `message_id`, ..., `hop_trace.<i>`, `payload.<path>`.
Document envelope_to_document(const Envelope& env);
Envelope envelope_from_document(const Document& doc);

}  // namespace acwp::protocol
