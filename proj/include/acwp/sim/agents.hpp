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
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "acwp/protocol/document.hpp"

namespace acwp::sim {

inline constexpr std::int64_t kQnhMin = 900;
inline constexpr std::int64_t kQnhMax = 1100;

/// Periodic QNH source. Values follow a seeded walk of at most +-3 hPa per
/// step, clamped to [900, 1100].
struct QnhSourceState {
  std::int64_t period_ms = 60000;
  std::int64_t next_due_ms = 60000;
  std::int64_t qnh = 1013;
  std::mt19937_64 rng;

  QnhSourceState(std::int64_t period, std::uint64_t seed)
      : period_ms(period), next_due_ms(period), rng(seed) {}
};

/// met.update payload when a publication is due at `now_ms`.
std::optional<protocol::Document> qnh_source_tick(QnhSourceState& state, std::int64_t now_ms);

class BadLegacyLine : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kLegacyLineWidth = 23;

struct LegacyContribution {
  std::string message_type;  // fpl.create or fpl.update
  protocol::Document payload;
};

/// Fixed columns: callsign 7, aircraft type 4, adep 4, ades 4, eobt 4 digits
/// (minutes since midnight). Callsign and type may be right-padded with
/// spaces. A trailing CR/LF is ignored.
protocol::Document parse_legacy_line(std::string_view line);

/// Translates one feed line. The first line for a callsign becomes
/// fpl.create, later ones fpl.update; `seen` tracks the callsigns sent.
LegacyContribution legacy_agent_translate(std::string_view line, std::set<std::string>& seen);

}  // namespace acwp::sim
