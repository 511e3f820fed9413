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

#include "acwp/status.hpp"

#include <array>

namespace acwp {
namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 21> kNames{{
    {ErrorCode::ok, "ok"},
    {ErrorCode::unknown_topic, "unknown-topic"},
    {ErrorCode::ownership_violation, "ownership-violation"},
    {ErrorCode::schema_violation, "schema-violation"},
    {ErrorCode::unknown_message_type, "unknown-message-type"},
    {ErrorCode::duplicate_subscription, "duplicate-subscription"},
    {ErrorCode::unknown_subscription, "unknown-subscription"},
    {ErrorCode::protocol_error, "protocol-error"},
    {ErrorCode::already_declared, "already-declared"},
    {ErrorCode::reserved_suffix, "reserved-suffix"},
    {ErrorCode::invalid_argument, "invalid-argument"},
    {ErrorCode::unknown_domain, "unknown-domain"},
    {ErrorCode::already_owned, "already-owned"},
    {ErrorCode::unknown_pending, "unknown-pending"},
    {ErrorCode::duplicate_client, "duplicate-client"},
    {ErrorCode::unknown_client, "unknown-client"},
    {ErrorCode::timeout, "timeout"},
    {ErrorCode::connection_refused, "connection-refused"},
    {ErrorCode::not_connected, "not-connected"},
    {ErrorCode::handler_error, "handler-error"},
    {ErrorCode::duplicate_broker, "duplicate-broker"},
}};

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "protocol-error";
}

ErrorCode error_code_from_name(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return ErrorCode::protocol_error;
}

std::string Status::to_string() const {
  if (ok()) return "ok";
  std::string out(error_code_name(code_));
  if (!message_.empty()) {
    out += ": ";
    out += message_;
  }
  return out;
}

}  // namespace acwp
