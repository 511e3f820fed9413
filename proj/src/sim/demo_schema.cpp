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

#include "acwp/sim/world.hpp"

namespace acwp::sim {

std::string_view demo_schema_text() {
  static constexpr std::string_view text = R"schema(# Demo message types for the tower integration scenario.

message fpl.create v1
field callsign string required pattern=/[A-Z0-9]{2,7}/
field aircraft_type string required pattern=/[A-Z0-9]{2,4}/
field adep string required pattern=/[A-Z]{4}/
field ades string required pattern=/[A-Z]{4}/
field runway string optional pattern=/[0-9]{2}[LCR]?/
field eobt int required min=0 max=1439
field squawk string optional pattern=/[0-7]{4}/
field status string optional enum(filed|cleared|taxiing|departed)

message fpl.update v1
field callsign string required pattern=/[A-Z0-9]{2,7}/
field aircraft_type string optional pattern=/[A-Z0-9]{2,4}/
field adep string optional pattern=/[A-Z]{4}/
field ades string optional pattern=/[A-Z]{4}/
field runway string optional pattern=/[0-9]{2}[LCR]?/
field eobt int optional min=0 max=1439
field squawk string optional pattern=/[0-7]{4}/
field status string optional enum(filed|cleared|taxiing|departed)

message fpl.delete v1
field callsign string required pattern=/[A-Z0-9]{2,7}/

# Full record published by the flight plan owner.
message fpl.record v1
field callsign string required pattern=/[A-Z0-9]{2,7}/
field aircraft_type string required pattern=/[A-Z0-9]{2,4}/
field adep string required pattern=/[A-Z]{4}/
field ades string required pattern=/[A-Z]{4}/
field runway string optional pattern=/[0-9]{2}[LCR]?/
field eobt int required min=0 max=1439
field squawk string required pattern=/[0-7]{4}/
field status string required enum(filed|cleared|taxiing|departed|cancelled)
field revision int required min=1

message fpl.rejection v1
field callsign string optional
field contribution_type string required
field reason string required enum(unknown-callsign|duplicate-callsign|unsupported-type|invalid-contribution)

message met.update v1
field qnh int required min=900 max=1100

message selection.update v1
field callsign string required pattern=/[A-Z0-9]{2,7}/
field position string required

message fpl.query v1
field callsign string required pattern=/[A-Z0-9]{2,7}/

message fpl.query_result v1
field found bool required
field record.callsign string optional
field record.aircraft_type string optional
field record.adep string optional
field record.ades string optional
field record.runway string optional
field record.eobt int optional
field record.squawk string optional
field record.status string optional
field record.revision int optional
)schema";
  return text;
}

std::shared_ptr<const protocol::SchemaSet> demo_schemas() {
  static const auto set = std::make_shared<const protocol::SchemaSet>(protocol::parse_schema_set(demo_schema_text()));
  return set;
}

std::string_view default_routes_text() {
  return "route fpl.contribution up\n"
         "route fpl.publication down\n"
         "route fpl.rejection down\n"
         "route met.publication down\n"
         "route fpl.publication.dlq up\n"
         "route met.publication.dlq up\n";
}

}  // namespace acwp::sim
