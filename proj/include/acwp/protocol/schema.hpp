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

#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "acwp/protocol/document.hpp"

namespace acwp::protocol {

enum class FieldKind { string, integer, decimal, boolean };

std::string_view field_kind_name(FieldKind kind);

struct FieldRule {
  std::string path;  // may contain `*` index wildcards
  FieldKind kind = FieldKind::string;
  bool required = false;
  std::vector<std::string> enum_values;
  std::optional<Decimal> min;
  std::optional<Decimal> max;
  std::optional<std::string> pattern;
  std::shared_ptr<const std::regex> compiled_pattern;

  /// Segment-wise match; `*` matches any index segment.
  bool matches(std::string_view doc_path) const;
};

struct MessageSchema {
  std::string type_name;
  int version = 1;
  std::vector<FieldRule> fields;
};

enum class ViolationKind { missing_required, wrong_kind, constraint_failed, unknown_field, unknown_type };

struct Violation {
  ViolationKind kind;
  std::string path;        // type name for unknown_type
  std::string constraint;  // enum | min | max | pattern, for constraint_failed

  /// One-line rendering, e.g. `wrong-kind qnh` or `constraint-failed qnh max`.
  std::string to_string() const;
  friend bool operator==(const Violation&, const Violation&) = default;
};

enum class ValidationMode { strict, permissive };

/// All schemas known to a channel, keyed by (type name, version).
class SchemaSet {
 public:
  /// Throws ProtocolError(duplicate_schema).
  void add(MessageSchema schema);
  /// Throws ProtocolError(duplicate_schema) on any overlap.
  void merge(const SchemaSet& other);

  /// Highest version registered for the type.
  const MessageSchema* latest(std::string_view type_name) const;
  const MessageSchema* find(std::string_view type_name, int version) const;

  std::size_t size() const { return schemas_.size(); }
  bool empty() const { return schemas_.empty(); }
  std::vector<std::string> type_names() const;

 private:
  std::map<std::pair<std::string, int>, MessageSchema, std::less<>> schemas_;
};

/// Parses the schema DSL:
///   message <type> v<int>
///   field <path> <string|int|decimal|bool> <required|optional> [enum(a|b)] [min=n] [max=n] [pattern=/re/]
/// Lines starting with `#` are comments. Throws ProtocolError(syntax |
/// duplicate_schema | duplicate_field_path) with a 1-based line number.
SchemaSet parse_schema_set(std::string_view text);

/// Every violation of `doc` against the latest schema for `type_name`.
std::vector<Violation> validate(const Document& doc, std::string_view type_name,
                                const SchemaSet& schemas,
                                ValidationMode mode = ValidationMode::strict);

std::vector<std::string> violation_lines(const std::vector<Violation>& violations);

}  // namespace acwp::protocol
