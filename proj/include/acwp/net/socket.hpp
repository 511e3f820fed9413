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
#include <string>
#include <string_view>

namespace acwp::net {

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// Parses `host:port`. Throws std::invalid_argument.
Endpoint parse_endpoint(std::string_view text);

/// Owning TCP socket descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release();
  void close();
  /// Shuts down both directions, waking any blocked reader.
  void shutdown();

  /// Writes everything or returns false.
  bool send_all(std::string_view data);
  /// Returns bytes read, 0 on orderly close, -1 on error.
  long recv_some(char* buf, std::size_t len);
  /// Waits up to `timeout_ms` for readability.
  bool wait_readable(int timeout_ms);

 private:
  int fd_ = -1;
};

/// Throws ClientError(connection_refused) on failure.
Socket connect_tcp(const Endpoint& endpoint);
/// Binds and listens; port 0 picks a free port. Throws std::runtime_error.
Socket listen_tcp(const Endpoint& endpoint);
std::uint16_t local_port(const Socket& socket);

}  // namespace acwp::net
