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

#include "acwp/protocol/schema_files.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "acwp/protocol/errors.hpp"

namespace acwp::protocol {

SchemaSet load_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProtocolError(ErrorKind::syntax, path.string() + ": cannot open schema file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_schema_set(ss.str());
  } catch (const ProtocolError& e) {
    throw ProtocolError(e.kind(), path.string() + ": " + e.what(), e.line(), e.subject());
  }
}

SchemaSet load_schema_path(std::string_view search_path) {
  SchemaSet out;
  std::size_t start = 0;
  while (start <= search_path.size()) {
    auto colon = search_path.find(':', start);
    if (colon == std::string_view::npos) colon = search_path.size();
    const std::filesystem::path entry(std::string(search_path.substr(start, colon - start)));
    start = colon + 1;
    if (entry.empty()) continue;
    if (std::filesystem::is_directory(entry)) {
      std::vector<std::filesystem::path> files;
      for (const auto& f : std::filesystem::directory_iterator(entry)) {
        if (f.is_regular_file() && f.path().extension() == ".schema") files.push_back(f.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) out.merge(load_schema_file(f));
    } else {
      out.merge(load_schema_file(entry));
    }
  }
  return out;
}

std::shared_ptr<const SchemaSet> schemas_from_environment() {
  const char* env = std::getenv("ACWP_SCHEMA_PATH");
  if (env == nullptr || *env == '\0') return nullptr;
  return std::make_shared<const SchemaSet>(load_schema_path(env));
}

}  // namespace acwp::protocol
