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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acwp/broker/broker.hpp"
#include "acwp/protocol/errors.hpp"
#include "acwp/protocol/frame.hpp"

namespace acwp::broker {

using ConnectionId = std::uint64_t;

struct Outbound {
  ConnectionId connection = 0;
  protocol::Frame frame;
  bool close = false;  // close the connection after writing this frame
};

/// Frame-level adapter between client connections and a Broker. Shared by
/// the TCP server and the simulator so both run the same command handling.
///
/// Synchronous confirmation uses PING barriers: a client that sends a
/// command followed by PING sees either an ERROR for the command or the PONG.
class Frontend {
 public:
  Frontend(Broker& broker, std::string role);

  Broker& broker() { return broker_; }
  const std::string& role() const { return role_; }

  std::vector<Outbound> handle(ConnectionId conn, const protocol::Frame& frame, std::int64_t now_ms);
  /// ERROR frame for undecodable input; the connection is closed.
  std::vector<Outbound> protocol_failure(ConnectionId conn, const protocol::ProtocolError& error);
  /// Treats the connection as a disconnect of its client.
  std::vector<Outbound> connection_closed(ConnectionId conn, std::int64_t now_ms);
  /// Dead-letters expired deliveries and dispatches whatever is queued.
  std::vector<Outbound> tick(std::int64_t now_ms);

  std::optional<std::string> client_of(ConnectionId conn) const;

 private:
  void dispatch(std::int64_t now_ms, std::vector<Outbound>& out);
  void error(ConnectionId conn, const Status& status, std::vector<Outbound>& out,
             std::map<std::string, std::string> context = {}, bool close = false);

  Broker& broker_;
  std::string role_;
  std::map<ConnectionId, std::string> clients_;
  std::map<std::string, ConnectionId, std::less<>> connections_;
};

/// PONG body for `info: topics`: broker id, role and per-topic descriptor,
/// owner, subscription count and counters under `topics.<i>.`.
protocol::Document topics_document(const Broker& broker, std::string_view role);
std::vector<TopicInfo> parse_topics_document(const protocol::Document& doc);

}  // namespace acwp::broker
