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

#include "acwp/protocol/schema.hpp"

#include <algorithm>
#include <cctype>

#include "acwp/protocol/errors.hpp"

namespace acwp::protocol {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

bool is_rule_path(std::string_view path) {
  if (path.empty()) return false;
  for (auto seg : split(path, '.')) {
    if (seg == "*") continue;
    if (!is_valid_path(seg)) return false;
  }
  return true;
}

bool is_type_name(std::string_view name) {
  if (name.empty()) return false;
  for (auto seg : split(name, '.')) {
    if (seg.empty() || !std::islower(static_cast<unsigned char>(seg.front()))) return false;
    for (char c : seg) {
      if (!std::islower(static_cast<unsigned char>(c)) &&
          !std::isdigit(static_cast<unsigned char>(c)) && c != '_') {
        return false;
      }
    }
  }
  return true;
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  // Whitespace-separated token; a `pattern=/.../` token extends to the closing
  // slash that is followed by whitespace or end of line.
  std::optional<std::string_view> next() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    if (pos_ >= line_.size()) return std::nullopt;
    const std::size_t start = pos_;
    if (line_.substr(start, 9) == "pattern=/") {
      std::size_t i = start + 9;
      while (i < line_.size()) {
        if (line_[i] == '\\') {
          i += 2;
          continue;
        }
        if (line_[i] == '/' &&
            (i + 1 == line_.size() || std::isspace(static_cast<unsigned char>(line_[i + 1])))) {
          pos_ = i + 1;
          return line_.substr(start, pos_ - start);
        }
        ++i;
      }
      fail("unterminated pattern");
    }
    while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    return line_.substr(start, pos_ - start);
  }

  std::string_view expect(const char* what) {
    auto tok = next();
    if (!tok) fail(std::string("expected ") + what);
    return *tok;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ProtocolError(ErrorKind::syntax, "line " + std::to_string(line_no_) + ": " + what,
                        line_no_);
  }

 private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

std::optional<Decimal> parse_bound(std::string_view text) {
  std::string error;
  auto v = parse_value(text, &error);
  if (!v) return std::nullopt;
  return v->as_number();
}

FieldRule parse_field(LineParser& p) {
  FieldRule rule;
  rule.path = std::string(p.expect("field path"));
  if (!is_rule_path(rule.path)) p.fail("invalid field path '" + rule.path + "'");
  const auto kind = p.expect("field kind");
  if (kind == "string") {
    rule.kind = FieldKind::string;
  } else if (kind == "int") {
    rule.kind = FieldKind::integer;
  } else if (kind == "decimal") {
    rule.kind = FieldKind::decimal;
  } else if (kind == "bool") {
    rule.kind = FieldKind::boolean;
  } else {
    p.fail("unknown field kind '" + std::string(kind) + "'");
  }
  const auto presence = p.expect("required|optional");
  if (presence == "required") {
    rule.required = true;
  } else if (presence != "optional") {
    p.fail("expected required|optional, got '" + std::string(presence) + "'");
  }
  const bool numeric = rule.kind == FieldKind::integer || rule.kind == FieldKind::decimal;
  while (auto tok = p.next()) {
    if (tok->starts_with("enum(") && tok->ends_with(")")) {
      const auto inner = tok->substr(5, tok->size() - 6);
      if (inner.empty()) p.fail("empty enum");
      for (auto v : split(inner, '|')) {
        if (v.empty()) p.fail("empty enum member");
        rule.enum_values.emplace_back(v);
      }
    } else if (tok->starts_with("min=") || tok->starts_with("max=")) {
      if (!numeric) p.fail("min/max only apply to int and decimal fields");
      auto bound = parse_bound(tok->substr(4));
      if (!bound) p.fail("bad numeric bound '" + std::string(*tok) + "'");
      (tok->starts_with("min=") ? rule.min : rule.max) = bound;
    } else if (tok->starts_with("pattern=/")) {
      if (rule.kind != FieldKind::string) p.fail("pattern only applies to string fields");
      rule.pattern = std::string(tok->substr(9, tok->size() - 10));
      try {
        rule.compiled_pattern = std::make_shared<const std::regex>(*rule.pattern, std::regex::ECMAScript);
      } catch (const std::regex_error&) {
        p.fail("bad pattern '" + *rule.pattern + "'");
      }
    } else {
      p.fail("unknown field option '" + std::string(*tok) + "'");
    }
  }
  return rule;
}

bool kind_matches(FieldKind kind, const Value& v) {
  switch (kind) {
    case FieldKind::string: return v.kind() == ValueKind::text;
    case FieldKind::integer: return v.kind() == ValueKind::integer;
    case FieldKind::decimal:
      return v.kind() == ValueKind::decimal || v.kind() == ValueKind::integer;
    case FieldKind::boolean: return v.kind() == ValueKind::boolean;
  }
  return false;
}

void check_rule(const FieldRule& rule, const std::string& path, const Value& v,
                std::vector<Violation>& out) {
  if (!kind_matches(rule.kind, v)) {
    out.push_back({ViolationKind::wrong_kind, path, {}});
    return;
  }
  if (!rule.enum_values.empty() &&
      std::find(rule.enum_values.begin(), rule.enum_values.end(), v.display()) ==
          rule.enum_values.end()) {
    out.push_back({ViolationKind::constraint_failed, path, "enum"});
  }
  if (auto n = v.as_number()) {
    if (rule.min && *n < *rule.min) out.push_back({ViolationKind::constraint_failed, path, "min"});
    if (rule.max && *n > *rule.max) out.push_back({ViolationKind::constraint_failed, path, "max"});
  }
  if (rule.compiled_pattern && !std::regex_match(v.as_text(), *rule.compiled_pattern)) {
    out.push_back({ViolationKind::constraint_failed, path, "pattern"});
  }
}

}  // namespace

std::string_view field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::string: return "string";
    case FieldKind::integer: return "int";
    case FieldKind::decimal: return "decimal";
    case FieldKind::boolean: return "bool";
  }
  return "string";
}

bool FieldRule::matches(std::string_view doc_path) const {
  const auto rule_segs = split(path, '.');
  const auto doc_segs = split(doc_path, '.');
  if (rule_segs.size() != doc_segs.size()) return false;
  for (std::size_t i = 0; i < rule_segs.size(); ++i) {
    if (rule_segs[i] == "*") {
      if (!is_index_segment(doc_segs[i])) return false;
    } else if (rule_segs[i] != doc_segs[i]) {
      return false;
    }
  }
  return true;
}

std::string Violation::to_string() const {
  switch (kind) {
    case ViolationKind::missing_required: return "missing-required " + path;
    case ViolationKind::wrong_kind: return "wrong-kind " + path;
    case ViolationKind::constraint_failed: return "constraint-failed " + path + " " + constraint;
    case ViolationKind::unknown_field: return "unknown-field " + path;
    case ViolationKind::unknown_type: return "unknown-type " + path;
  }
  return path;
}

void SchemaSet::add(MessageSchema schema) {
  auto key = std::make_pair(schema.type_name, schema.version);
  if (schemas_.contains(key)) {
    throw ProtocolError(ErrorKind::duplicate_schema,
                        "duplicate schema " + schema.type_name + " v" +
                            std::to_string(schema.version),
                        0, schema.type_name);
  }
  schemas_.emplace(std::move(key), std::move(schema));
}

void SchemaSet::merge(const SchemaSet& other) {
  for (const auto& [key, schema] : other.schemas_) add(schema);
}

const MessageSchema* SchemaSet::latest(std::string_view type_name) const {
  const MessageSchema* best = nullptr;
  for (const auto& [key, schema] : schemas_) {
    if (key.first == type_name) best = &schema;  // map order puts higher versions last
  }
  return best;
}

const MessageSchema* SchemaSet::find(std::string_view type_name, int version) const {
  auto it = schemas_.find(std::make_pair(std::string(type_name), version));
  return it == schemas_.end() ? nullptr : &it->second;
}

std::vector<std::string> SchemaSet::type_names() const {
  std::vector<std::string> out;
  for (const auto& [key, schema] : schemas_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

SchemaSet parse_schema_set(std::string_view text) {
  SchemaSet set;
  std::optional<MessageSchema> current;
  std::size_t current_line = 0;
  auto flush = [&] {
    if (!current) return;
    try {
      set.add(std::move(*current));
    } catch (const ProtocolError& e) {
      throw ProtocolError(e.kind(), "line " + std::to_string(current_line) + ": " + e.what(),
                          current_line, e.subject());
    }
    current.reset();
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineParser p(line, line_no);
    auto first = p.next();
    if (!first || first->front() == '#') continue;
    if (*first == "message") {
      flush();
      MessageSchema schema;
      schema.type_name = std::string(p.expect("type name"));
      if (!is_type_name(schema.type_name)) p.fail("invalid type name '" + schema.type_name + "'");
      const auto ver = p.expect("version");
      if (ver.size() < 2 || ver.front() != 'v' ||
          !std::all_of(ver.begin() + 1, ver.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
          ver.size() > 10) {
        p.fail("expected version v<int>, got '" + std::string(ver) + "'");
      }
      schema.version = std::stoi(std::string(ver.substr(1)));
      if (p.next()) p.fail("unexpected token after version");
      current = std::move(schema);
      current_line = line_no;
    } else if (*first == "field") {
      if (!current) p.fail("field outside of a message block");
      FieldRule rule = parse_field(p);
      const bool dup = std::any_of(current->fields.begin(), current->fields.end(),
                                   [&](const FieldRule& r) { return r.path == rule.path; });
      if (dup) {
        throw ProtocolError(ErrorKind::duplicate_field_path,
                            "line " + std::to_string(line_no) + ": duplicate field path '" +
                                rule.path + "'",
                            line_no, rule.path);
      }
      current->fields.push_back(std::move(rule));
    } else {
      p.fail("unknown directive '" + std::string(*first) + "'");
    }
  }
  flush();
  return set;
}

std::vector<Violation> validate(const Document& doc, std::string_view type_name,
                                const SchemaSet& schemas, ValidationMode mode) {
  std::vector<Violation> out;
  const MessageSchema* schema = schemas.latest(type_name);
  if (schema == nullptr) {
    out.push_back({ViolationKind::unknown_type, std::string(type_name), {}});
    return out;
  }
  for (const auto& rule : schema->fields) {
    bool seen = false;
    for (const auto& [path, value] : doc.entries()) {
      if (!rule.matches(path)) continue;
      seen = true;
      check_rule(rule, path, value, out);
    }
    if (!seen && rule.required) out.push_back({ViolationKind::missing_required, rule.path, {}});
  }
  if (mode == ValidationMode::strict) {
    for (const auto& [path, value] : doc.entries()) {
      const bool known = std::any_of(schema->fields.begin(), schema->fields.end(),
                                     [&](const FieldRule& r) { return r.matches(path); });
      if (!known) out.push_back({ViolationKind::unknown_field, path, {}});
    }
  }
  return out;
}

std::vector<std::string> violation_lines(const std::vector<Violation>& violations) {
  std::vector<std::string> out;
  out.reserve(violations.size());
  for (const auto& v : violations) out.push_back(v.to_string());
  return out;
}

}  // namespace acwp::protocol
