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

#include "acwp/protocol/errors.hpp"

namespace acwp::protocol {

ProtocolError::ProtocolError(ErrorKind kind, const std::string& message, std::size_t line,
                             std::string subject)
    : std::runtime_error(message), kind_(kind), line_(line), subject_(std::move(subject)) {}

}  // namespace acwp::protocol
