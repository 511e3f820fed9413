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

#include "acwp/sim/scenario.hpp"

#include <array>
#include <charconv>
#include <utility>

namespace acwp::sim {

using protocol::Value;

namespace {

constexpr std::array<std::pair<ActionKind, std::string_view>, 11> kActions{{
    {ActionKind::contribute, "contribute"},
    {ActionKind::publish, "publish"},
    {ActionKind::subscribe, "subscribe"},
    {ActionKind::withhold_ack, "withhold_ack"},
    {ActionKind::disconnect, "disconnect"},
    {ActionKind::attach_broker, "attach_broker"},
    {ActionKind::detach_broker, "detach_broker"},
    {ActionKind::partition, "partition"},
    {ActionKind::heal, "heal"},
    {ActionKind::select, "select"},
    {ActionKind::legacy, "legacy"},
}};

std::vector<std::string> tokenize(std::string_view line, std::size_t lineno) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t') {
      ++i;
      continue;
    }
    std::string tok;
    bool quoted = false;
    while (i < line.size() && (quoted || (line[i] != ' ' && line[i] != '\t'))) {
      const char c = line[i++];
      tok.push_back(c);
      if (quoted && c == '\\' && i < line.size()) {
        tok.push_back(line[i++]);
      } else if (c == '"') {
        quoted = !quoted;
      }
    }
    if (quoted) throw ScenarioError("unterminated string", lineno);
    out.push_back(std::move(tok));
  }
  return out;
}

std::string unquote(const std::string& tok, std::size_t lineno) {
  if (tok.empty() || tok.front() != '"') return tok;
  auto v = protocol::parse_value(tok);
  if (!v || v->kind() != protocol::ValueKind::text) throw ScenarioError("bad string " + tok, lineno);
  return v->as_text();
}

std::size_t positional_count(ActionKind k) {
  switch (k) {
    case ActionKind::publish: return 2;
    case ActionKind::disconnect: return 0;
    default: return 1;
  }
}

bool takes_payload(ActionKind k) { return k == ActionKind::contribute || k == ActionKind::publish; }

}  // namespace

std::string_view action_name(ActionKind kind) {
  for (const auto& [k, n] : kActions) {
    if (k == kind) return n;
  }
  return "?";
}

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::size_t lineno = 0;
  std::int64_t last = 0;
  while (!text.empty()) {
    auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;

    auto toks = tokenize(line, lineno);
    if (toks.size() < 4 || toks[0] != "at") throw ScenarioError("expected 'at <ms> <actor> <action>'", lineno);
    Action a;
    auto [p, ec] = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), a.at_ms);
    if (ec != std::errc{} || p != toks[1].data() + toks[1].size() || a.at_ms < 0) {
      throw ScenarioError("bad time '" + toks[1] + "'", lineno);
    }
    if (a.at_ms < last) throw ScenarioError("time goes backwards", lineno);
    last = a.at_ms;
    a.actor = toks[2];
    bool found = false;
    for (const auto& [k, n] : kActions) {
      if (n == toks[3]) {
        a.kind = k;
        found = true;
      }
    }
    if (!found) throw ScenarioError("unknown action '" + toks[3] + "'", lineno);

    const std::size_t need = positional_count(a.kind);
    std::size_t i = 4;
    for (; i < toks.size() && a.args.size() < need; ++i) a.args.push_back(unquote(toks[i], lineno));
    if (a.args.size() < need) {
      throw ScenarioError(std::string(action_name(a.kind)) + " needs " + std::to_string(need) + " argument(s)", lineno);
    }
    if (a.kind == ActionKind::withhold_ack && i < toks.size() && toks[i] == "off") {
      a.args.push_back("off");
      ++i;
    }
    for (; i < toks.size(); ++i) {
      const auto eq = toks[i].find('=');
      if (!takes_payload(a.kind) || eq == std::string::npos) {
        throw ScenarioError("unexpected argument '" + toks[i] + "'", lineno);
      }
      const std::string path = toks[i].substr(0, eq);
      std::string err;
      auto v = protocol::parse_value(std::string_view(toks[i]).substr(eq + 1), &err);
      if (!protocol::is_valid_path(path) || !v) throw ScenarioError("bad field '" + toks[i] + "'", lineno);
      if (a.payload.contains(path)) throw ScenarioError("duplicate field '" + path + "'", lineno);
      a.payload.add(path, std::move(*v));
    }
    sc.actions.push_back(std::move(a));
  }
  return sc;
}

std::string format_scenario(const Scenario& scenario) {
  std::string out;
  for (const auto& a : scenario.actions) {
    out += "at " + std::to_string(a.at_ms) + " " + a.actor + " " + std::string(action_name(a.kind));
    for (const auto& arg : a.args) {
      const bool plain = !arg.empty() && arg.find_first_of(" \t\"\\") == std::string::npos;
      out += " " + (plain ? arg : Value::text(arg).encode());
    }
    const auto payload = protocol::canonicalize(a.payload);
    for (const auto& [path, value] : payload.entries()) {
      out += " " + path + "=" + value.encode();
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace acwp::sim
