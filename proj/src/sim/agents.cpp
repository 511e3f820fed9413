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

#include "acwp/sim/agents.hpp"

#include <algorithm>

namespace acwp::sim {

using protocol::Document;
using protocol::Value;

std::optional<Document> qnh_source_tick(QnhSourceState& s, std::int64_t now_ms) {
  if (s.period_ms <= 0 || now_ms < s.next_due_ms) return std::nullopt;
  while (s.next_due_ms <= now_ms) s.next_due_ms += s.period_ms;
  const auto step = static_cast<std::int64_t>(s.rng() % 7) - 3;
  s.qnh = std::clamp(s.qnh + step, kQnhMin, kQnhMax);
  return Document{{"qnh", Value::integer(s.qnh)}};
}

namespace {

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

bool all_of(std::string_view s, bool (*pred)(char)) {
  return !s.empty() && std::all_of(s.begin(), s.end(), pred);
}

bool upper_or_digit(char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }
bool upper(char c) { return c >= 'A' && c <= 'Z'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

Document parse_legacy_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  if (line.size() != kLegacyLineWidth) {
    throw BadLegacyLine("legacy line must be " + std::to_string(kLegacyLineWidth) +
                        " characters, got " + std::to_string(line.size()));
  }
  const auto callsign = trim_right(line.substr(0, 7));
  const auto type = trim_right(line.substr(7, 4));
  const auto adep = line.substr(11, 4);
  const auto ades = line.substr(15, 4);
  const auto eobt = line.substr(19, 4);
  if (callsign.size() < 2 || !all_of(callsign, upper_or_digit)) throw BadLegacyLine("bad callsign column");
  if (type.size() < 2 || !all_of(type, upper_or_digit)) throw BadLegacyLine("bad aircraft type column");
  if (!all_of(adep, upper)) throw BadLegacyLine("bad adep column");
  if (!all_of(ades, upper)) throw BadLegacyLine("bad ades column");
  if (!all_of(eobt, digit)) throw BadLegacyLine("bad eobt column");
  const int minutes = std::stoi(std::string(eobt));
  if (minutes > 1439) throw BadLegacyLine("eobt out of range");
  return Document{{"adep", Value::text(std::string(adep))},
                  {"ades", Value::text(std::string(ades))},
                  {"aircraft_type", Value::text(std::string(type))},
                  {"callsign", Value::text(std::string(callsign))},
                  {"eobt", Value::integer(minutes)}};
}

LegacyContribution legacy_agent_translate(std::string_view line, std::set<std::string>& seen) {
  Document doc = parse_legacy_line(line);
  const std::string callsign = doc.find("callsign")->as_text();
  const bool known = !seen.insert(callsign).second;
  return {known ? "fpl.update" : "fpl.create", std::move(doc)};
}

}  // namespace acwp::sim
