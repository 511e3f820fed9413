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

#include "acwp/broker/topic.hpp"

namespace acwp::broker {

std::string_view topic_kind_name(TopicKind kind) {
  switch (kind) {
    case TopicKind::plain: return "plain";
    case TopicKind::contribution: return "contribution";
    case TopicKind::publication: return "publication";
    case TopicKind::rejection: return "rejection";
    case TopicKind::dead_letter: return "dead_letter";
  }
  return "plain";
}

std::optional<TopicKind> topic_kind_from_name(std::string_view name) {
  for (auto k : {TopicKind::plain, TopicKind::contribution, TopicKind::publication,
                 TopicKind::rejection, TopicKind::dead_letter}) {
    if (topic_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view topic_scope_name(TopicScope scope) {
  return scope == TopicScope::global ? "global" : "local";
}

std::optional<TopicScope> topic_scope_from_name(std::string_view name) {
  if (name == "global") return TopicScope::global;
  if (name == "local") return TopicScope::local;
  return std::nullopt;
}

std::string contribution_topic(std::string_view domain) {
  return std::string(domain) + ".contribution";
}
std::string publication_topic(std::string_view domain) {
  return std::string(domain) + ".publication";
}
std::string rejection_topic(std::string_view domain) { return std::string(domain) + ".rejection"; }
std::string dead_letter_topic(std::string_view topic) {
  return std::string(topic) + std::string(kDeadLetterSuffix);
}
std::string reply_topic(std::string_view client_id) { return "_reply." + std::string(client_id); }

bool is_dead_letter_name(std::string_view topic) { return topic.ends_with(kDeadLetterSuffix); }

std::string owner_subscription_id(std::string_view client_id, std::string_view domain) {
  return std::string(client_id) + ".own." + std::string(domain);
}

}  // namespace acwp::broker
