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

#include "acwp/protocol/frame.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include "acwp/protocol/errors.hpp"

namespace acwp::protocol {
namespace {

constexpr std::string_view kMagic = "ACWP/1 ";
constexpr std::string_view kContentLength = "content-length";

constexpr std::array<std::pair<Command, std::string_view>, 12> kCommands{{
    {Command::connect, "CONNECT"},
    {Command::connected, "CONNECTED"},
    {Command::subscribe, "SUBSCRIBE"},
    {Command::unsubscribe, "UNSUBSCRIBE"},
    {Command::publish, "PUBLISH"},
    {Command::message, "MESSAGE"},
    {Command::ack, "ACK"},
    {Command::own, "OWN"},
    {Command::error, "ERROR"},
    {Command::ping, "PING"},
    {Command::pong, "PONG"},
    {Command::disconnect, "DISCONNECT"},
}};

bool is_header_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
}

[[noreturn]] void syntax(const std::string& what, std::size_t line = 0) {
  throw ProtocolError(ErrorKind::syntax, what, line);
}

struct Head {
  Frame frame;
  std::size_t content_length = 0;
};

// `head` excludes the terminating blank line.
Head parse_head(std::string_view head) {
  Head out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_length = false;
  while (pos <= head.size()) {
    auto eol = head.find('\n', pos);
    if (eol == std::string_view::npos) eol = head.size();
    const std::string_view line = head.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line_no == 1) {
      if (line.substr(0, kMagic.size()) != kMagic) syntax("bad start line", 1);
      const auto name = line.substr(kMagic.size());
      auto cmd = command_from_name(name);
      if (!cmd) {
        throw ProtocolError(ErrorKind::unknown_command,
                            "unknown command '" + std::string(name) + "'", 1, std::string(name));
      }
      out.frame.command = *cmd;
      continue;
    }
    const auto colon = line.find(": ");
    if (colon == std::string_view::npos) syntax("malformed header line", line_no);
    const auto name = line.substr(0, colon);
    const auto value = line.substr(colon + 2);
    if (!is_header_name(name)) syntax("bad header name '" + std::string(name) + "'", line_no);
    if (name == kContentLength) {
      if (have_length) syntax("duplicate header content-length", line_no);
      have_length = true;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out.content_length);
      if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
        syntax("bad content-length", line_no);
      }
      continue;
    }
    if (!out.frame.headers.emplace(std::string(name), std::string(value)).second) {
      syntax("duplicate header " + std::string(name), line_no);
    }
  }
  if (!have_length) syntax("missing content-length");
  return out;
}

}  // namespace

std::string_view command_name(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "PING";
}

std::optional<Command> command_from_name(std::string_view name) {
  for (const auto& [cmd, n] : kCommands) {
    if (n == name) return cmd;
  }
  return std::nullopt;
}

std::optional<std::string_view> Frame::header(std::string_view name) const {
  auto it = headers.find(name);
  if (it == headers.end()) return std::nullopt;
  return std::string_view(it->second);
}

std::vector<std::string_view> required_headers(Command c) {
  switch (c) {
    case Command::connect: return {"client-id"};
    case Command::subscribe: return {"topic", "subscription-id"};
    case Command::unsubscribe: return {"subscription-id"};
    case Command::publish:
      return {"topic", "message-id", "sender-id", "message-type", "timestamp"};
    case Command::message:
      return {"topic", "message-id", "sender-id", "message-type", "timestamp",
              "subscription-id", "hop-trace"};
    case Command::ack: return {"message-id", "subscription-id"};
    case Command::own: return {"domain"};
    case Command::error: return {"error-code"};
    default: return {};
  }
}

void check_required_headers(const Frame& frame) {
  for (auto name : required_headers(frame.command)) {
    if (!frame.headers.contains(name)) {
      throw ProtocolError(ErrorKind::missing_header,
                          std::string(command_name(frame.command)) + " frame missing header '" +
                              std::string(name) + "'",
                          0, std::string(name));
    }
  }
}

std::string encode_frame(const Frame& frame) {
  check_required_headers(frame);
  std::string out;
  out.reserve(64 + frame.body.size());
  out += kMagic;
  out += command_name(frame.command);
  out += "\ncontent-length: ";
  out += std::to_string(frame.body.size());
  out += '\n';
  for (const auto& [name, value] : frame.headers) {
    if (!is_header_name(name) || name == kContentLength) {
      syntax("invalid header name '" + name + "'");
    }
    if (value.find('\n') != std::string::npos) syntax("header '" + name + "' contains LF");
    out += name;
    out += ": ";
    out += value;
    out += '\n';
  }
  out += '\n';
  out += frame.body;
  return out;
}

std::optional<Frame> FrameDecoder::next() {
  const auto end = buffer_.find("\n\n");
  if (end == std::string::npos) {
    if (buffer_.size() > max_frame_bytes_) {
      throw ProtocolError(ErrorKind::frame_too_large, "frame head exceeds size limit");
    }
    return std::nullopt;
  }
  Head head = parse_head(std::string_view(buffer_).substr(0, end));
  const std::size_t head_bytes = end + 2;
  if (head.content_length > max_frame_bytes_ ||
      head_bytes + head.content_length > max_frame_bytes_) {
    throw ProtocolError(ErrorKind::frame_too_large,
                        "frame of " + std::to_string(head_bytes + head.content_length) +
                            " bytes exceeds limit of " + std::to_string(max_frame_bytes_));
  }
  if (buffer_.size() < head_bytes + head.content_length) return std::nullopt;
  head.frame.body = buffer_.substr(head_bytes, head.content_length);
  buffer_.erase(0, head_bytes + head.content_length);
  check_required_headers(head.frame);
  return std::move(head.frame);
}

void FrameDecoder::finish() const {
  if (buffer_.empty()) return;
  const auto end = buffer_.find("\n\n");
  if (end == std::string::npos) syntax("stream ended inside frame head");
  throw ProtocolError(ErrorKind::length_mismatch,
                      "stream ended before content-length body bytes arrived");
}

std::optional<Frame> decode_frame(std::istream& in, std::size_t max_frame_bytes) {
  std::string head;
  char c = 0;
  while (true) {
    if (!in.get(c)) {
      if (head.empty()) return std::nullopt;
      syntax("stream ended inside frame head");
    }
    head += c;
    if (head.size() >= 2 && head.compare(head.size() - 2, 2, "\n\n") == 0) break;
    if (head.size() > max_frame_bytes) {
      throw ProtocolError(ErrorKind::frame_too_large, "frame head exceeds size limit");
    }
  }
  Head parsed = parse_head(std::string_view(head).substr(0, head.size() - 2));
  if (parsed.content_length > max_frame_bytes || head.size() + parsed.content_length > max_frame_bytes) {
    throw ProtocolError(ErrorKind::frame_too_large, "frame exceeds size limit");
  }
  parsed.frame.body.resize(parsed.content_length);
  in.read(parsed.frame.body.data(), static_cast<std::streamsize>(parsed.content_length));
  if (static_cast<std::size_t>(in.gcount()) != parsed.content_length) {
    throw ProtocolError(ErrorKind::length_mismatch,
                        "expected " + std::to_string(parsed.content_length) + " body bytes, got " +
                            std::to_string(in.gcount()));
  }
  check_required_headers(parsed.frame);
  return std::move(parsed.frame);
}

Frame decode_frame(std::string_view bytes, std::size_t max_frame_bytes) {
  FrameDecoder decoder(max_frame_bytes);
  decoder.feed(bytes);
  auto frame = decoder.next();
  if (!frame) {
    decoder.finish();
    syntax("incomplete frame");
  }
  if (!decoder.idle()) syntax("trailing bytes after frame");
  return std::move(*frame);
}

}  // namespace acwp::protocol
