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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acwp/client/session.hpp"
#include "acwp/protocol/document.hpp"
#include "acwp/protocol/envelope.hpp"

namespace acwp::sim {

struct FlightPlan {
  std::string callsign;
  std::string aircraft_type;
  std::string adep;
  std::string ades;
  std::optional<std::string> runway;
  std::int64_t eobt = 0;
  std::string squawk;
  std::string status = "filed";
  std::int64_t revision = 1;

  /// fpl.record payload.
  protocol::Document to_document() const;
  static std::optional<FlightPlan> from_document(const protocol::Document& doc);

  friend bool operator==(const FlightPlan&, const FlightPlan&) = default;
};

/// State of the flight plan data owner. `last_revision` survives deletion so
/// that a re-created callsign continues its revision sequence.
struct FplOwnerState {
  std::map<std::string, FlightPlan> plans;
  std::map<std::string, std::int64_t> last_revision;
  std::uint32_t squawks_assigned = 0;

  friend bool operator==(const FplOwnerState&, const FplOwnerState&) = default;
};

/// Squawk handed out for the n-th flight plan without one (n from 0):
/// octal 1000 upward, wrapping within 0000-7777.
std::string squawk_for(std::uint32_t n);

struct OwnerResult {
  std::vector<client::OwnerOutput> outputs;
};

/// Applies one contribution (fpl.create | fpl.update | fpl.delete). Invalid
/// contributions leave the state unchanged and produce one fpl.rejection.
OwnerResult fpl_owner_apply(FplOwnerState& state, const protocol::Envelope& contribution);

/// A CWP's mirror of the published flight plans and the latest QNH.
struct CwpReplica {
  std::map<std::string, FlightPlan> plans;
  std::map<std::string, std::int64_t> seen_revision;
  std::optional<std::int64_t> qnh;

  friend bool operator==(const CwpReplica&, const CwpReplica&) = default;
};

/// Returns false when the publication was stale and ignored.
bool cwp_apply(CwpReplica& replica, const protocol::Envelope& publication);

}  // namespace acwp::sim
