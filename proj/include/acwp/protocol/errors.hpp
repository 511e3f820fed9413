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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acwp::protocol {

enum class ErrorKind {
  syntax,
  duplicate_path,
  unknown_command,
  length_mismatch,
  frame_too_large,
  missing_header,
  duplicate_schema,
  duplicate_field_path,
};

/// Raised by the codecs and the schema parser. `line()` is 1-based and 0 when
/// the error is not tied to a line. `subject()` names the offending header,
/// path or schema when there is one.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorKind kind, const std::string& message, std::size_t line = 0,
                std::string subject = {});

  ErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  const std::string& subject() const { return subject_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
  std::string subject_;
};

}  // namespace acwp::protocol
