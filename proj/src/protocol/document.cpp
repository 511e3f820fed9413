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

#include "acwp/protocol/document.hpp"

#include <algorithm>
#include <map>

#include "acwp/protocol/errors.hpp"

namespace acwp::protocol {
namespace {

bool is_name_segment(std::string_view s) {
  if (s.empty() || s.front() < 'a' || s.front() > 'z') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

bool is_index_segment(std::string_view s) {
  if (s.empty()) return false;
  if (s.size() > 1 && s.front() == '0') return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_valid_path(std::string_view path) {
  if (path.empty()) return false;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const auto seg = path.substr(start, dot == std::string_view::npos ? path.npos : dot - start);
    if (!is_name_segment(seg) && !is_index_segment(seg)) return false;
    if (dot == std::string_view::npos) return true;
    start = dot + 1;
  }
}

Document::Document(std::initializer_list<Entry> entries) {
  for (const auto& [path, value] : entries) add(path, value);
}

void Document::add(std::string path, Value value) {
  if (!is_valid_path(path)) {
    throw ProtocolError(ErrorKind::syntax, "invalid path '" + path + "'", 0, path);
  }
  if (contains(path)) {
    throw ProtocolError(ErrorKind::duplicate_path, "duplicate path '" + path + "'", 0, path);
  }
  entries_.emplace_back(std::move(path), std::move(value));
}

void Document::set(std::string path, Value value) {
  for (auto& [p, v] : entries_) {
    if (p == path) {
      v = std::move(value);
      return;
    }
  }
  add(std::move(path), std::move(value));
}

bool Document::erase(std::string_view path) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry& e) { return e.first == path; });
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

const Value* Document::find(std::string_view path) const {
  for (const auto& [p, v] : entries_) {
    if (p == path) return &v;
  }
  return nullptr;
}

bool Document::is_canonical() const {
  return std::is_sorted(entries_.begin(), entries_.end(),
                        [](const Entry& a, const Entry& b) { return a.first < b.first; });
}

Document Document::subtree(std::string_view prefix) const {
  Document out;
  const std::string lead = std::string(prefix) + ".";
  for (const auto& [p, v] : entries_) {
    if (p.size() > lead.size() && p.compare(0, lead.size(), lead) == 0) {
      out.entries_.emplace_back(p.substr(lead.size()), v);
    }
  }
  return out;
}

bool operator==(const Document& a, const Document& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [p, v] : a.entries_) {
    const Value* other = b.find(p);
    if (other == nullptr || !(*other == v)) return false;
  }
  return true;
}

Document canonicalize(Document doc) {
  std::stable_sort(doc.entries_.begin(), doc.entries_.end(),
                   [](const Document::Entry& a, const Document::Entry& b) {
                     return a.first < b.first;
                   });
  return doc;
}

std::string encode_document(const Document& doc) {
  std::vector<const Document::Entry*> sorted;
  sorted.reserve(doc.size());
  for (const auto& e : doc.entries()) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  std::string out;
  for (const auto* e : sorted) {
    out += e->first;
    out += " = ";
    out += e->second.encode();
    out += '\n';
  }
  return out;
}

Document parse_document(std::string_view text) {
  Document doc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ProtocolError(ErrorKind::syntax, "line " + std::to_string(line_no) + ": expected '='",
                          line_no);
    }
    const auto path = trim(line.substr(0, eq));
    const auto value_text = trim(line.substr(eq + 1));
    if (!is_valid_path(path)) {
      throw ProtocolError(ErrorKind::syntax,
                          "line " + std::to_string(line_no) + ": invalid path '" +
                              std::string(path) + "'",
                          line_no, std::string(path));
    }
    std::string why;
    auto value = parse_value(value_text, &why);
    if (!value) {
      throw ProtocolError(ErrorKind::syntax, "line " + std::to_string(line_no) + ": " + why,
                          line_no, std::string(path));
    }
    if (doc.contains(path)) {
      throw ProtocolError(ErrorKind::duplicate_path,
                          "line " + std::to_string(line_no) + ": duplicate path '" +
                              std::string(path) + "'",
                          line_no, std::string(path));
    }
    doc.add(std::string(path), std::move(*value));
  }
  return doc;
}

}  // namespace acwp::protocol
