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

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acwp::protocol {

enum class Command {
  connect,
  connected,
  subscribe,
  unsubscribe,
  publish,
  message,
  ack,
  own,
  error,
  ping,
  pong,
  disconnect,
};

std::string_view command_name(Command c);
std::optional<Command> command_from_name(std::string_view name);

inline constexpr std::size_t kDefaultMaxFrameBytes = 1024 * 1024;

/// A wire frame. `content-length` is not stored in `headers`; the encoder
/// derives it from `body` and the decoder checks and strips it.
struct Frame {
  Command command = Command::ping;
  std::map<std::string, std::string, std::less<>> headers;
  std::string body;

  std::optional<std::string_view> header(std::string_view name) const;
  Frame& set(std::string name, std::string value) {
    headers[std::move(name)] = std::move(value);
    return *this;
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Headers a frame of the given command must carry.
std::vector<std::string_view> required_headers(Command c);

/// Throws ProtocolError(missing_header) naming the first absent header.
void check_required_headers(const Frame& frame);

/// `ACWP/1 <COMMAND>\n`, `content-length` first, remaining headers in name
/// order, a blank line, then the body. Throws ProtocolError on an invalid
/// header name or a value containing LF.
std::string encode_frame(const Frame& frame);

/// Incremental decoder over a byte stream.
class FrameDecoder {
 public:
  explicit FrameDecoder(std::size_t max_frame_bytes = kDefaultMaxFrameBytes)
      : max_frame_bytes_(max_frame_bytes) {}

  void feed(std::string_view bytes) { buffer_.append(bytes); }

  /// Returns the next complete frame, or nullopt if more bytes are needed.
  /// Throws ProtocolError(syntax | unknown_command | missing_header |
  /// frame_too_large).
  std::optional<Frame> next();

  /// Call at end of stream. Throws ProtocolError(length_mismatch) when a
  /// body was cut short and ProtocolError(syntax) for a truncated head.
  void finish() const;

  bool idle() const { return buffer_.empty(); }

 private:
  std::size_t max_frame_bytes_;
  std::string buffer_;
};

/// Reads exactly one frame from `in`. Returns nullopt on a clean end of
/// stream before the first byte.
std::optional<Frame> decode_frame(std::istream& in, std::size_t max_frame_bytes = kDefaultMaxFrameBytes);

/// Decodes a buffer holding exactly one frame.
Frame decode_frame(std::string_view bytes, std::size_t max_frame_bytes = kDefaultMaxFrameBytes);

}  // namespace acwp::protocol
