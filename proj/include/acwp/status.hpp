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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace acwp {

/// Error codes shared by the broker engine, the wire protocol and the client SDK.
/// The kebab-case names returned by error_code_name() travel in the
/// `error-code` header of ERROR frames.
enum class ErrorCode {
  ok,
  unknown_topic,
  ownership_violation,
  schema_violation,
  unknown_message_type,
  duplicate_subscription,
  unknown_subscription,
  protocol_error,
  already_declared,
  reserved_suffix,
  invalid_argument,
  unknown_domain,
  already_owned,
  unknown_pending,
  duplicate_client,
  unknown_client,
  timeout,
  connection_refused,
  not_connected,
  handler_error,
  duplicate_broker,
};

std::string_view error_code_name(ErrorCode code);
ErrorCode error_code_from_name(std::string_view name);

/// Result of a broker or session command. Violations are only populated for
/// schema_violation.
class Status {
 public:
  Status() = default;
  Status(ErrorCode code, std::string message, std::vector<std::string> violations = {})
      : code_(code), message_(std::move(message)), violations_(std::move(violations)) {}

  static Status Ok() { return {}; }

  bool ok() const { return code_ == ErrorCode::ok; }
  explicit operator bool() const { return ok(); }
  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }
  const std::vector<std::string>& violations() const { return violations_; }

  std::string to_string() const;

 private:
  ErrorCode code_ = ErrorCode::ok;
  std::string message_;
  std::vector<std::string> violations_;
};

}  // namespace acwp
