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

namespace acwp::broker {

inline constexpr std::int64_t kDefaultAckDeadlineMs = 2000;
inline constexpr std::string_view kDeadLetterSuffix = ".dlq";

enum class TopicKind { plain, contribution, publication, rejection, dead_letter };
enum class TopicScope { global, local };

std::string_view topic_kind_name(TopicKind kind);
std::optional<TopicKind> topic_kind_from_name(std::string_view name);
std::string_view topic_scope_name(TopicScope scope);
std::optional<TopicScope> topic_scope_from_name(std::string_view name);

struct TopicDescriptor {
  std::string name;
  TopicKind kind = TopicKind::plain;
  TopicScope scope = TopicScope::global;
  std::int64_t ack_deadline_ms = kDefaultAckDeadlineMs;
  std::optional<std::string> domain;

  friend bool operator==(const TopicDescriptor&, const TopicDescriptor&) = default;
};

std::string contribution_topic(std::string_view domain);
std::string publication_topic(std::string_view domain);
std::string rejection_topic(std::string_view domain);
std::string dead_letter_topic(std::string_view topic);
std::string reply_topic(std::string_view client_id);
bool is_dead_letter_name(std::string_view topic);

/// Subscription id under which register_owner() subscribes the owner to the
/// domain's contribution topic.
std::string owner_subscription_id(std::string_view client_id, std::string_view domain);

}  // namespace acwp::broker
