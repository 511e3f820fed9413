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

#include "acwp/broker/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "acwp/protocol/errors.hpp"
#include "acwp/protocol/schema_files.hpp"

namespace acwp::broker {

using protocol::Document;
using protocol::Value;
using protocol::ValueKind;

namespace {

std::string require_text(const Document& doc, const std::string& path) {
  const Value* v = doc.find(path);
  if (v == nullptr || v->kind() != ValueKind::text) {
    throw ConfigError("config: '" + path + "' must be a string");
  }
  return v->as_text();
}

std::optional<std::string> opt_text(const Document& doc, const std::string& path) {
  const Value* v = doc.find(path);
  if (v == nullptr) return std::nullopt;
  if (v->kind() != ValueKind::text) throw ConfigError("config: '" + path + "' must be a string");
  return v->as_text();
}

std::optional<std::int64_t> opt_int(const Document& doc, const std::string& path) {
  const Value* v = doc.find(path);
  if (v == nullptr) return std::nullopt;
  if (v->kind() != ValueKind::integer) throw ConfigError("config: '" + path + "' must be an integer");
  return v->as_integer();
}

}  // namespace

BrokerConfig parse_broker_config(const Document& doc, const std::filesystem::path& base_dir) {
  BrokerConfig cfg;
  cfg.id = require_text(doc, "broker.id");
  if (!protocol::is_valid_client_id(cfg.id)) throw ConfigError("config: invalid broker.id '" + cfg.id + "'");
  if (auto v = opt_text(doc, "broker.listen")) cfg.listen = *v;
  if (auto v = opt_int(doc, "broker.ack_deadline_ms")) cfg.ack_deadline_ms = *v;
  if (const Value* v = doc.find("broker.strict")) {
    if (v->kind() != ValueKind::boolean) throw ConfigError("config: 'broker.strict' must be a boolean");
    cfg.strict = v->as_boolean();
  }
  for (std::size_t i = 0;; ++i) {
    auto f = opt_text(doc, "schemas." + std::to_string(i));
    if (!f) break;
    std::filesystem::path p(*f);
    cfg.schema_files.push_back(p.is_absolute() || base_dir.empty() ? p : base_dir / p);
  }
  for (std::size_t i = 0;; ++i) {
    const std::string key = "topics." + std::to_string(i) + ".";
    auto name = opt_text(doc, key + "name");
    if (!name) break;
    TopicDescriptor d;
    d.name = *name;
    d.ack_deadline_ms = opt_int(doc, key + "ack_deadline_ms").value_or(cfg.ack_deadline_ms);
    if (auto scope = opt_text(doc, key + "scope")) {
      auto s = topic_scope_from_name(*scope);
      if (!s) throw ConfigError("config: '" + key + "scope' must be global or local");
      d.scope = *s;
    }
    cfg.topics.push_back(std::move(d));
  }
  for (std::size_t i = 0;; ++i) {
    const std::string key = "domains." + std::to_string(i) + ".";
    auto name = opt_text(doc, key + "name");
    if (!name) break;
    cfg.domains.emplace_back(*name, opt_int(doc, key + "ack_deadline_ms").value_or(cfg.ack_deadline_ms));
  }
  std::set<std::string, std::less<>> known{"broker.id", "broker.listen", "broker.ack_deadline_ms", "broker.strict"};
  for (std::size_t i = 0; i < cfg.schema_files.size(); ++i) known.insert("schemas." + std::to_string(i));
  for (std::size_t i = 0; i < cfg.topics.size(); ++i) {
    for (const char* f : {"name", "scope", "ack_deadline_ms"}) known.insert("topics." + std::to_string(i) + "." + f);
  }
  for (std::size_t i = 0; i < cfg.domains.size(); ++i) {
    for (const char* f : {"name", "ack_deadline_ms"}) known.insert("domains." + std::to_string(i) + "." + f);
  }
  for (const auto& [path, value] : doc.entries()) {
    if (!known.contains(path)) throw ConfigError("config: unknown key '" + path + "'");
  }
  return cfg;
}

BrokerConfig load_broker_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(file.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_broker_config(protocol::parse_document(ss.str()), file.parent_path());
  } catch (const protocol::ProtocolError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::unique_ptr<Broker> build_broker(const BrokerConfig& config) {
  BrokerOptions options;
  options.id = config.id;
  options.validation = config.strict ? protocol::ValidationMode::strict : protocol::ValidationMode::permissive;
  if (!config.schema_files.empty()) {
    auto set = std::make_shared<protocol::SchemaSet>();
    try {
      for (const auto& f : config.schema_files) set->merge(protocol::load_schema_file(f));
    } catch (const protocol::ProtocolError& e) {
      throw ConfigError(e.what());
    }
    options.schemas = std::move(set);
  }
  auto broker = std::make_unique<Broker>(std::move(options));
  for (const auto& t : config.topics) {
    if (auto st = broker->declare_topic(t); !st) throw ConfigError("topic '" + t.name + "': " + st.to_string());
  }
  for (const auto& [name, deadline] : config.domains) {
    if (auto st = broker->declare_domain(name, deadline); !st) {
      throw ConfigError("domain '" + name + "': " + st.to_string());
    }
  }
  return broker;
}

}  // namespace acwp::broker
