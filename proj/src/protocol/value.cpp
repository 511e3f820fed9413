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

#include "acwp/protocol/value.hpp"

#include <charconv>
#include <cstdlib>
#include <limits>

namespace acwp::protocol {
namespace {

std::uint64_t magnitude(std::int64_t v) {
  return v < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
}

int digit_count(std::uint64_t v) {
  int n = 1;
  while (v >= 10) {
    v /= 10;
    ++n;
  }
  return n;
}

std::uint64_t pow10(int n) {
  std::uint64_t r = 1;
  while (n-- > 0) r *= 10;
  return r;
}

std::strong_ordering compare_magnitude(std::uint64_t ma, std::int32_t ea, std::uint64_t mb,
                                       std::int32_t eb) {
  const int da = digit_count(ma);
  const int db = digit_count(mb);
  const std::int64_t adj_a = std::int64_t(ea) + da;
  const std::int64_t adj_b = std::int64_t(eb) + db;
  if (adj_a != adj_b) return adj_a <=> adj_b;
  // Same leading-digit position: left-align both mantissas to the same width.
  const int width = std::max(da, db);
  return ma * pow10(width - da) <=> mb * pow10(width - db);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::optional<std::uint32_t> read_hex4(std::string_view s, std::size_t pos) {
  if (pos + 4 > s.size()) return std::nullopt;
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const int h = hex_value(s[pos + i]);
    if (h < 0) return std::nullopt;
    v = v * 16 + static_cast<std::uint32_t>(h);
  }
  return v;
}

std::optional<Value> fail(std::string* error, const char* why) {
  if (error != nullptr) *error = why;
  return std::nullopt;
}

std::optional<Value> parse_quoted(std::string_view text, std::string* error) {
  if (text.size() < 2 || text.back() != '"') return fail(error, "unterminated string");
  std::string out;
  out.reserve(text.size());
  const std::size_t end = text.size() - 1;
  for (std::size_t i = 1; i < end; ++i) {
    const char c = text[i];
    if (c == '"') return fail(error, "unescaped quote in string");
    if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
      return fail(error, "raw control character in string");
    }
    if (c != '\\') {
      out += c;
      continue;
    }
    if (++i >= end) return fail(error, "dangling escape");
    switch (text[i]) {
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'u': {
        auto cp = read_hex4(text.substr(0, end), i + 1);
        if (!cp) return fail(error, "bad \\u escape");
        i += 4;
        if (*cp >= 0xDC00 && *cp <= 0xDFFF) return fail(error, "lone low surrogate");
        if (*cp >= 0xD800 && *cp <= 0xDBFF) {
          if (i + 2 >= end || text[i + 1] != '\\' || text[i + 2] != 'u') {
            return fail(error, "lone high surrogate");
          }
          auto low = read_hex4(text.substr(0, end), i + 3);
          if (!low || *low < 0xDC00 || *low > 0xDFFF) return fail(error, "bad surrogate pair");
          i += 6;
          *cp = 0x10000 + ((*cp - 0xD800) << 10) + (*low - 0xDC00);
        }
        append_utf8(out, *cp);
        break;
      }
      default:
        return fail(error, "unknown escape");
    }
  }
  if (!is_valid_utf8(out)) return fail(error, "invalid UTF-8 in string");
  return Value::text(std::move(out));
}

std::optional<Value> parse_integer(std::string_view text, std::string* error) {
  std::string_view digits = text;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  if (digits.empty()) return fail(error, "bad number");
  for (char c : digits) {
    if (!is_digit(c)) return fail(error, "bad number");
  }
  if (digits.size() > 1 && digits.front() == '0') return fail(error, "leading zero");
  if (text == "-0") return fail(error, "negative zero");
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return fail(error, "integer out of range");
  }
  return Value::integer(v);
}

}  // namespace

Decimal::Decimal(std::int64_t mantissa, std::int32_t exponent)
    : mantissa_(mantissa), exponent_(exponent) {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  while (mantissa_ % 10 == 0) {
    mantissa_ /= 10;
    ++exponent_;
  }
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size()) return std::nullopt;
  std::string digits;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i == dot) continue;
    if (!is_digit(text[i])) return std::nullopt;
    digits += text[i];
  }
  if (dot > 1 && text.front() == '0') return std::nullopt;  // leading zero in integer part
  std::int64_t exponent = -static_cast<std::int64_t>(text.size() - dot - 1);
  while (digits.size() > 1 && digits.back() == '0') {
    digits.pop_back();
    ++exponent;
  }
  const auto first = digits.find_first_not_of('0');
  if (first == std::string::npos) return Decimal();
  digits.erase(0, first);
  if (digits.size() > kMaxSignificantDigits) return std::nullopt;
  if (exponent < std::numeric_limits<std::int32_t>::min()) return std::nullopt;
  std::int64_t m = 0;
  std::from_chars(digits.data(), digits.data() + digits.size(), m);
  return Decimal(negative ? -m : m, static_cast<std::int32_t>(exponent));
}

std::string Decimal::to_string() const {
  if (mantissa_ == 0) return "0.0";
  std::string digits = std::to_string(magnitude(mantissa_));
  std::string out = mantissa_ < 0 ? "-" : "";
  if (exponent_ >= 0) {
    out += digits;
    out.append(static_cast<std::size_t>(exponent_), '0');
    out += ".0";
    return out;
  }
  const std::size_t frac = static_cast<std::size_t>(-static_cast<std::int64_t>(exponent_));
  if (frac >= digits.size()) {
    out += "0.";
    out.append(frac - digits.size(), '0');
    out += digits;
  } else {
    out += digits.substr(0, digits.size() - frac);
    out += '.';
    out += digits.substr(digits.size() - frac);
  }
  return out;
}

double Decimal::to_double() const { return std::strtod(to_string().c_str(), nullptr); }

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  const int sa = (a.mantissa_ > 0) - (a.mantissa_ < 0);
  const int sb = (b.mantissa_ > 0) - (b.mantissa_ < 0);
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  const auto mag = compare_magnitude(magnitude(a.mantissa_), a.exponent_, magnitude(b.mantissa_),
                                     b.exponent_);
  if (sa > 0) return mag;
  return 0 <=> mag;
}

std::string_view value_kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::null: return "null";
    case ValueKind::text: return "string";
    case ValueKind::integer: return "int";
    case ValueKind::decimal: return "decimal";
    case ValueKind::boolean: return "bool";
  }
  return "null";
}

std::optional<Decimal> Value::as_number() const {
  if (kind() == ValueKind::integer) return Decimal::from_integer(as_integer());
  if (kind() == ValueKind::decimal) return as_decimal();
  return std::nullopt;
}

std::string Value::encode() const {
  switch (kind()) {
    case ValueKind::null: return "null";
    case ValueKind::text: return '"' + escape_text(as_text()) + '"';
    case ValueKind::integer: return std::to_string(as_integer());
    case ValueKind::decimal: return as_decimal().to_string();
    case ValueKind::boolean: return as_boolean() ? "true" : "false";
  }
  return "null";
}

std::string Value::display() const {
  return kind() == ValueKind::text ? as_text() : encode();
}

std::optional<Value> parse_value(std::string_view text, std::string* error) {
  if (text.empty()) return fail(error, "missing value");
  if (text == "null") return Value::null();
  if (text == "true") return Value::boolean(true);
  if (text == "false") return Value::boolean(false);
  if (text.front() == '"') return parse_quoted(text, error);
  if (text.find('.') != std::string_view::npos) {
    if (auto d = Decimal::parse(text)) return Value::decimal(*d);
    return fail(error, "bad decimal");
  }
  return parse_integer(text, error);
}

std::string escape_text(std::string_view raw) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size() + 2);
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (u < 0x20 || u == 0x7f) {
          out += "\\u00";
          out += kHex[u >> 4];
          out += kHex[u & 0xF];
        } else {
          out += c;
        }
    }
  }
  return out;
}

bool is_valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    int extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + static_cast<std::size_t>(extra) >= bytes.size()) return false;
    for (int k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000)) {
      return false;  // overlong
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += static_cast<std::size_t>(extra) + 1;
  }
  return true;
}

}  // namespace acwp::protocol
