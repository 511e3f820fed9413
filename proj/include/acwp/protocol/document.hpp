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

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acwp/protocol/value.hpp"

namespace acwp::protocol {

/// Path segments are `[a-z][a-z0-9_]*` or a decimal index, joined by '.'.
bool is_valid_path(std::string_view path);
bool is_index_segment(std::string_view segment);

/// An ordered set of path/value entries. Paths are unique; entry order is the
/// insertion order until canonicalize() sorts it. Equality ignores order.
class Document {
 public:
  using Entry = std::pair<std::string, Value>;

  Document() = default;
  Document(std::initializer_list<Entry> entries);

  /// Appends a new entry. Throws ProtocolError(syntax) on a bad path and
  /// ProtocolError(duplicate_path) if the path exists.
  void add(std::string path, Value value);
  /// Inserts or replaces.
  void set(std::string path, Value value);
  bool erase(std::string_view path);

  const Value* find(std::string_view path) const;
  bool contains(std::string_view path) const { return find(path) != nullptr; }

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool is_canonical() const;

  /// Entries below `prefix.` with the prefix stripped.
  Document subtree(std::string_view prefix) const;

  friend bool operator==(const Document& a, const Document& b);

 private:
  friend Document canonicalize(Document doc);
  std::vector<Entry> entries_;
};

/// `path = value` lines sorted bytewise by path, LF terminated.
std::string encode_document(const Document& doc);

/// Accepts any entry order, blank lines, `#` comment lines and extra spaces
/// around `=`. Throws ProtocolError(syntax) with a 1-based line number, or
/// ProtocolError(duplicate_path).
Document parse_document(std::string_view text);

Document canonicalize(Document doc);

}  // namespace acwp::protocol
