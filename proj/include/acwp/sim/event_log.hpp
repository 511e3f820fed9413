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
#include <string>
#include <string_view>
#include <vector>

namespace acwp::sim {

struct Event {
  std::int64_t time_ms = 0;
  std::string broker;
  std::string kind;
  std::string topic;
  std::string message_id;
  std::string client;
  std::string detail;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Append-only, totally ordered record of a simulation run.
class EventLog {
 public:
  void append(Event e) { events_.push_back(std::move(e)); }
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  std::vector<Event> filter(const std::function<bool(const Event&)>& pred) const;
  std::vector<Event> of_kind(std::string_view kind) const;

  /// One line per event: time, broker, kind, topic, message id, client and
  /// detail separated by tabs; empty fields print as `-`.
  std::string to_text() const;

 private:
  std::vector<Event> events_;
};

std::string format_event(const Event& e);

}  // namespace acwp::sim
