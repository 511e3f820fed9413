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

#include "acwp/sim/event_log.hpp"

namespace acwp::sim {

namespace {

void field(std::string& out, std::string_view v) {
  out.push_back('\t');
  if (v.empty()) {
    out.push_back('-');
    return;
  }
  for (char c : v) out.push_back(c == '\t' || c == '\n' || c == '\r' ? ' ' : c);
}

}  // namespace

std::string format_event(const Event& e) {
  std::string out = std::to_string(e.time_ms);
  field(out, e.broker);
  field(out, e.kind);
  field(out, e.topic);
  field(out, e.message_id);
  field(out, e.client);
  field(out, e.detail);
  return out;
}

std::vector<Event> EventLog::filter(const std::function<bool(const Event&)>& pred) const {
  std::vector<Event> out;
  for (const auto& e : events_) {
    if (pred(e)) out.push_back(e);
  }
  return out;
}

std::vector<Event> EventLog::of_kind(std::string_view kind) const {
  return filter([kind](const Event& e) { return e.kind == kind; });
}

std::string EventLog::to_text() const {
  std::string out;
  for (const auto& e : events_) {
    out += format_event(e);
    out.push_back('\n');
  }
  return out;
}

}  // namespace acwp::sim
