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

#include "acwp/sim/flight_plan.hpp"

#include <cstdio>

namespace acwp::sim {

using protocol::Document;
using protocol::Value;
using protocol::ValueKind;

namespace {

const std::string* text_at(const Document& doc, std::string_view path) {
  const Value* v = doc.find(path);
  return v != nullptr && v->kind() == ValueKind::text ? &v->as_text() : nullptr;
}

std::optional<std::int64_t> int_at(const Document& doc, std::string_view path) {
  const Value* v = doc.find(path);
  if (v == nullptr || v->kind() != ValueKind::integer) return std::nullopt;
  return v->as_integer();
}

client::OwnerOutput rejection(const protocol::Envelope& c, std::string_view reason) {
  Document d;
  if (const auto* cs = text_at(c.payload, "callsign")) d.add("callsign", Value::text(*cs));
  d.add("contribution_type", Value::text(c.message_type));
  d.add("reason", Value::text(std::string(reason)));
  return {client::OwnerOutput::Target::rejection, "fpl.rejection", protocol::canonicalize(std::move(d))};
}

client::OwnerOutput publication(const FlightPlan& fp) {
  return {client::OwnerOutput::Target::publication, "fpl.record", fp.to_document()};
}

void merge(FlightPlan& fp, const Document& doc) {
  if (const auto* v = text_at(doc, "aircraft_type")) fp.aircraft_type = *v;
  if (const auto* v = text_at(doc, "adep")) fp.adep = *v;
  if (const auto* v = text_at(doc, "ades")) fp.ades = *v;
  if (const auto* v = text_at(doc, "runway")) fp.runway = *v;
  if (auto v = int_at(doc, "eobt")) fp.eobt = *v;
  if (const auto* v = text_at(doc, "squawk")) fp.squawk = *v;
  if (const auto* v = text_at(doc, "status")) fp.status = *v;
}

}  // namespace

Document FlightPlan::to_document() const {
  Document d;
  d.add("adep", Value::text(adep));
  d.add("ades", Value::text(ades));
  d.add("aircraft_type", Value::text(aircraft_type));
  d.add("callsign", Value::text(callsign));
  d.add("eobt", Value::integer(eobt));
  d.add("revision", Value::integer(revision));
  if (runway) d.add("runway", Value::text(*runway));
  d.add("squawk", Value::text(squawk));
  d.add("status", Value::text(status));
  return d;
}

std::optional<FlightPlan> FlightPlan::from_document(const Document& doc) {
  FlightPlan fp;
  const auto* cs = text_at(doc, "callsign");
  const auto* type = text_at(doc, "aircraft_type");
  const auto* adep = text_at(doc, "adep");
  const auto* ades = text_at(doc, "ades");
  const auto* squawk = text_at(doc, "squawk");
  const auto* status = text_at(doc, "status");
  auto eobt = int_at(doc, "eobt");
  auto revision = int_at(doc, "revision");
  if (!cs || !type || !adep || !ades || !squawk || !status || !eobt || !revision) return std::nullopt;
  fp.callsign = *cs;
  fp.aircraft_type = *type;
  fp.adep = *adep;
  fp.ades = *ades;
  if (const auto* rwy = text_at(doc, "runway")) fp.runway = *rwy;
  fp.eobt = *eobt;
  fp.squawk = *squawk;
  fp.status = *status;
  fp.revision = *revision;
  return fp;
}

std::string squawk_for(std::uint32_t n) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04o", (0'1000 + n) % 0'10000);
  return buf;
}

OwnerResult fpl_owner_apply(FplOwnerState& state, const protocol::Envelope& c) {
  OwnerResult result;
  const auto* cs = text_at(c.payload, "callsign");
  if (cs == nullptr) {
    result.outputs.push_back(rejection(c, "invalid-contribution"));
    return result;
  }
  auto it = state.plans.find(*cs);
  if (c.message_type == "fpl.create") {
    if (it != state.plans.end()) {
      result.outputs.push_back(rejection(c, "duplicate-callsign"));
      return result;
    }
    FlightPlan fp;
    fp.callsign = *cs;
    merge(fp, c.payload);
    if (fp.aircraft_type.empty() || fp.adep.empty() || fp.ades.empty()) {
      result.outputs.push_back(rejection(c, "invalid-contribution"));
      return result;
    }
    if (fp.squawk.empty()) fp.squawk = squawk_for(state.squawks_assigned++);
    auto last = state.last_revision.find(*cs);
    fp.revision = last == state.last_revision.end() ? 1 : last->second + 1;
    state.last_revision[*cs] = fp.revision;
    state.plans.emplace(*cs, fp);
    result.outputs.push_back(publication(fp));
  } else if (c.message_type == "fpl.update") {
    if (it == state.plans.end()) {
      result.outputs.push_back(rejection(c, "unknown-callsign"));
      return result;
    }
    merge(it->second, c.payload);
    it->second.revision += 1;
    state.last_revision[*cs] = it->second.revision;
    result.outputs.push_back(publication(it->second));
  } else if (c.message_type == "fpl.delete") {
    if (it == state.plans.end()) {
      result.outputs.push_back(rejection(c, "unknown-callsign"));
      return result;
    }
    FlightPlan fp = it->second;
    fp.status = "cancelled";
    fp.revision += 1;
    state.last_revision[*cs] = fp.revision;
    state.plans.erase(it);
    result.outputs.push_back(publication(fp));
  } else {
    result.outputs.push_back(rejection(c, "unsupported-type"));
  }
  return result;
}

bool cwp_apply(CwpReplica& replica, const protocol::Envelope& env) {
  if (env.message_type == "met.update") {
    if (auto q = int_at(env.payload, "qnh")) {
      replica.qnh = *q;
      return true;
    }
    return false;
  }
  if (env.message_type != "fpl.record") return false;
  auto fp = FlightPlan::from_document(env.payload);
  if (!fp) return false;
  auto& seen = replica.seen_revision[fp->callsign];
  if (fp->revision <= seen) return false;
  seen = fp->revision;
  if (fp->status == "cancelled") {
    replica.plans.erase(fp->callsign);
  } else {
    replica.plans[fp->callsign] = *fp;
  }
  return true;
}

}  // namespace acwp::sim
