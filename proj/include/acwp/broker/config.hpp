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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "acwp/broker/broker.hpp"
#include "acwp/protocol/document.hpp"

namespace acwp {

/// Invalid configuration; the message names the offending key or file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace acwp

namespace acwp::broker {

/// Broker configuration file, written in the document grammar:
///
///   broker.id = "central"
///   broker.listen = "127.0.0.1:7700"
///   broker.ack_deadline_ms = 2000
///   broker.strict = true
///   schemas.0 = "demo.schema"
///   topics.0.name = "selection"
///   topics.0.scope = "local"
///   domains.0.name = "fpl"
struct BrokerConfig {
  std::string id;
  std::string listen = "127.0.0.1:0";
  std::int64_t ack_deadline_ms = kDefaultAckDeadlineMs;
  bool strict = true;
  std::vector<std::filesystem::path> schema_files;  // resolved against the config directory
  std::vector<TopicDescriptor> topics;
  std::vector<std::pair<std::string, std::int64_t>> domains;
};

BrokerConfig parse_broker_config(const protocol::Document& doc,
                                 const std::filesystem::path& base_dir = {});
BrokerConfig load_broker_config(const std::filesystem::path& file);

/// Loads the schema files and declares every topic and domain.
std::unique_ptr<Broker> build_broker(const BrokerConfig& config);

}  // namespace acwp::broker
