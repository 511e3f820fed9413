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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace acwp::protocol {

/// Base-10 number `mantissa * 10^exponent`, kept normalized so that equal
/// numbers have equal representations (no trailing zeros in the mantissa,
/// zero is {0, 0}). Never converted through binary floating point on the wire.
class Decimal {
 public:
  static constexpr int kMaxSignificantDigits = 15;

  Decimal() = default;
  Decimal(std::int64_t mantissa, std::int32_t exponent);
  static Decimal from_integer(std::int64_t v) { return Decimal(v, 0); }

  /// Parses `-?[0-9]+\.[0-9]+` with at most 15 significant digits.
  static std::optional<Decimal> parse(std::string_view text);

  std::int64_t mantissa() const { return mantissa_; }
  std::int32_t exponent() const { return exponent_; }

  /// Shortest text that re-parses to an equal value; always has a '.'.
  std::string to_string() const;
  double to_double() const;

  friend bool operator==(const Decimal&, const Decimal&) = default;
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

 private:
  std::int64_t mantissa_ = 0;
  std::int32_t exponent_ = 0;
};

enum class ValueKind { null, text, integer, decimal, boolean };

std::string_view value_kind_name(ValueKind kind);

/// One leaf of a Document.
class Value {
 public:
  Value() = default;

  static Value null() { return Value(); }
  static Value text(std::string s) { return Value(Storage(std::in_place_index<1>, std::move(s))); }
  static Value integer(std::int64_t v) { return Value(Storage(std::in_place_index<2>, v)); }
  static Value decimal(Decimal d) { return Value(Storage(std::in_place_index<3>, d)); }
  static Value boolean(bool b) { return Value(Storage(std::in_place_index<4>, b)); }

  ValueKind kind() const { return static_cast<ValueKind>(storage_.index()); }
  bool is_null() const { return kind() == ValueKind::null; }

  const std::string& as_text() const { return std::get<1>(storage_); }
  std::int64_t as_integer() const { return std::get<2>(storage_); }
  const Decimal& as_decimal() const { return std::get<3>(storage_); }
  bool as_boolean() const { return std::get<4>(storage_); }

  /// Numeric view for integer and decimal values.
  std::optional<Decimal> as_number() const;

  /// Wire form of the value (quoted and escaped for text).
  std::string encode() const;
  /// Unquoted rendering used for enum comparison and diagnostics.
  std::string display() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  using Storage = std::variant<std::monostate, std::string, std::int64_t, Decimal, bool>;
  explicit Value(Storage s) : storage_(std::move(s)) {}
  Storage storage_;
};

/// Parses one wire value. Returns nullopt on malformed input; `error` receives
/// a short reason.
std::optional<Value> parse_value(std::string_view text, std::string* error = nullptr);

std::string escape_text(std::string_view raw);
bool is_valid_utf8(std::string_view bytes);

}  // namespace acwp::protocol
