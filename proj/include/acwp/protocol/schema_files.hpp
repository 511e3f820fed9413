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

#include <filesystem>
#include <memory>
#include <string_view>

#include "acwp/protocol/schema.hpp"

namespace acwp::protocol {

/// Errors are rethrown as ProtocolError with the file name prefixed.
SchemaSet load_schema_file(const std::filesystem::path& path);

/// Colon-separated list of schema files and directories; directories
/// contribute every `*.schema` file in name order.
SchemaSet load_schema_path(std::string_view search_path);

/// Schemas from ACWP_SCHEMA_PATH, or null when the variable is unset or empty.
std::shared_ptr<const SchemaSet> schemas_from_environment();

}  // namespace acwp::protocol
