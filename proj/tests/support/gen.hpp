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
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "acwp/protocol/document.hpp"
#include "acwp/protocol/envelope.hpp"
#include "acwp/protocol/frame.hpp"

namespace acwp::testing {

using Rng = std::mt19937_64;

inline std::int64_t pick(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, int percent = 50) { return pick(rng, 0, 99) < percent; }

inline std::string identifier(Rng& rng, std::size_t max_len = 6) {
  static constexpr char kFirst[] = "abcdefghijklmnopqrstuvwxyz";
  static constexpr char kRest[] = "abcdefghijklmnopqrstuvwxyz0123456789_";
  std::string s(1, kFirst[pick(rng, 0, 25)]);
  const auto n = pick(rng, 0, static_cast<std::int64_t>(max_len) - 1);
  for (std::int64_t i = 0; i < n; ++i) s += kRest[pick(rng, 0, sizeof(kRest) - 2)];
  return s;
}

inline std::string path(Rng& rng) {
  std::string p = identifier(rng);
  const auto extra = pick(rng, 0, 3);
  for (std::int64_t i = 0; i < extra; ++i) {
    p += '.';
    p += coin(rng, 30) ? std::to_string(pick(rng, 0, 20)) : identifier(rng);
  }
  return p;
}

inline void append_utf8(std::string& s, std::uint32_t cp) {
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xF0 | (cp >> 18));
    s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

/// Valid UTF-8 with quotes, backslashes, control characters and multi-byte
/// code points mixed in.
inline std::string text(Rng& rng, std::size_t max_len = 16) {
  std::string s;
  const auto n = pick(rng, 0, static_cast<std::int64_t>(max_len));
  for (std::int64_t i = 0; i < n; ++i) {
    switch (pick(rng, 0, 9)) {
      case 0: s += "\"\\\n\t"[pick(rng, 0, 3)]; break;
      case 1: s += static_cast<char>(pick(rng, 0, 0x1F)); break;
      case 2: s += '\x7f'; break;
      case 3: append_utf8(s, static_cast<std::uint32_t>(pick(rng, 0x80, 0x7FF))); break;
      case 4: {
        auto cp = static_cast<std::uint32_t>(pick(rng, 0x800, 0xFFFD));
        if (cp >= 0xD800 && cp <= 0xDFFF) cp = 0x20AC;
        append_utf8(s, cp);
        break;
      }
      case 5: append_utf8(s, static_cast<std::uint32_t>(pick(rng, 0x10000, 0x10FFFF))); break;
      default: s += static_cast<char>(pick(rng, 0x20, 0x7E));
    }
  }
  return s;
}

inline protocol::Decimal decimal(Rng& rng) {
  const int digits = static_cast<int>(pick(rng, 1, protocol::Decimal::kMaxSignificantDigits));
  std::int64_t m = 0;
  for (int i = 0; i < digits; ++i) m = m * 10 + pick(rng, 0, 9);
  if (coin(rng)) m = -m;
  return protocol::Decimal(m, static_cast<std::int32_t>(pick(rng, -18, 8)));
}

inline std::int64_t integer(Rng& rng) {
  switch (pick(rng, 0, 4)) {
    case 0: return std::numeric_limits<std::int64_t>::min();
    case 1: return std::numeric_limits<std::int64_t>::max();
    case 2: return pick(rng, -1000, 1000);
    default: return static_cast<std::int64_t>(rng());
  }
}

inline protocol::Value value(Rng& rng) {
  using protocol::Value;
  switch (pick(rng, 0, 5)) {
    case 0: return Value::null();
    case 1: return Value::boolean(coin(rng));
    case 2: return Value::integer(integer(rng));
    case 3: return Value::decimal(decimal(rng));
    default: return Value::text(text(rng));
  }
}

inline protocol::Document document(Rng& rng, std::size_t max_entries = 12) {
  protocol::Document d;
  const auto n = pick(rng, 0, static_cast<std::int64_t>(max_entries));
  for (std::int64_t i = 0; i < n; ++i) {
    auto p = path(rng);
    if (!d.contains(p)) d.add(std::move(p), value(rng));
  }
  return d;
}

inline std::string header_name(Rng& rng) {
  static constexpr char kChars[] = "abcdefghijklmnopqrstuvwxyz0123456789-";
  std::string s;
  const auto n = pick(rng, 1, 12);
  for (std::int64_t i = 0; i < n; ++i) s += kChars[pick(rng, 0, sizeof(kChars) - 2)];
  return s;
}

inline std::string header_value(Rng& rng) {
  std::string s = text(rng, 20);
  for (auto& c : s) {
    if (c == '\n') c = ' ';
  }
  return s;
}

inline std::string bytes(Rng& rng, std::size_t max_len = 64) {
  std::string s;
  const auto n = pick(rng, 0, static_cast<std::int64_t>(max_len));
  for (std::int64_t i = 0; i < n; ++i) s += static_cast<char>(pick(rng, 0, 255));
  return s;
}

/// Any command, its required headers, random extra headers, random body.
inline protocol::Frame frame(Rng& rng) {
  using protocol::Command;
  protocol::Frame f;
  f.command = static_cast<Command>(pick(rng, 0, static_cast<int>(Command::disconnect)));
  for (auto name : protocol::required_headers(f.command)) f.set(std::string(name), header_value(rng));
  const auto extra = pick(rng, 0, 4);
  for (std::int64_t i = 0; i < extra; ++i) {
    auto name = header_name(rng);
    if (name != "content-length") f.headers.emplace(std::move(name), header_value(rng));
  }
  f.body = bytes(rng);
  return f;
}

inline std::string topic(Rng& rng) {
  std::string t = identifier(rng, 5);
  const auto extra = pick(rng, 0, 2);
  for (std::int64_t i = 0; i < extra; ++i) t += "." + identifier(rng, 5);
  return t;
}

inline protocol::Envelope envelope(Rng& rng) {
  protocol::Envelope e;
  e.topic = topic(rng);
  e.sender_id = identifier(rng);
  e.message_id = protocol::make_message_id(e.sender_id, static_cast<std::uint64_t>(pick(rng, 1, 1 << 30)));
  e.message_type = topic(rng);
  e.timestamp_ms = pick(rng, 0, 4'000'000'000'000);
  if (coin(rng)) e.correlation_id = identifier(rng) + ":" + std::to_string(pick(rng, 1, 99));
  if (coin(rng)) e.reply_to = "_reply." + identifier(rng);
  std::set<std::string> used;
  const auto hops = pick(rng, 0, 3);
  for (std::int64_t i = 0; i < hops; ++i) {
    auto id = identifier(rng, 4);
    if (used.insert(id).second) e.hop_trace.push_back(id);
  }
  e.payload = document(rng, 6);
  return e;
}

}  // namespace acwp::testing
