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

#include "acwp/client/session.hpp"

#include <chrono>

#include "acwp/broker/topic.hpp"
#include "acwp/protocol/errors.hpp"

namespace acwp::client {

using protocol::Command;

namespace {

Status status_from_error_frame(const Frame& f) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < f.body.size()) {
    auto eol = f.body.find('\n', pos);
    if (eol == std::string::npos) eol = f.body.size();
    if (eol > pos) lines.push_back(f.body.substr(pos, eol - pos));
    pos = eol + 1;
  }
  auto code = f.header("error-code");
  auto message = f.header("message");
  return {code ? error_code_from_name(*code) : ErrorCode::protocol_error,
          message ? std::string(*message) : std::string(), std::move(lines)};
}

std::string header_or_empty(const Frame& f, std::string_view name) {
  auto v = f.header(name);
  return v ? std::string(*v) : std::string();
}

}  // namespace

Session::Session(SessionOptions options, Transport& transport)
    : options_(std::move(options)), transport_(transport) {
  if (!options_.clock) {
    options_.clock = [] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
  }
}

std::int64_t Session::now() const { return options_.clock(); }

bool Session::connected() const {
  std::lock_guard lock(mu_);
  return state_ == State::connected;
}

void Session::send_locked(const Frame& frame) {
  transport_.send(frame);
  ++frames_sent_;
}

std::uint64_t Session::frames_sent() const {
  std::lock_guard lock(mu_);
  return frames_sent_;
}

void Session::require_open_locked() const {
  if (state_ != State::connecting && state_ != State::connected) {
    throw ClientError({ErrorCode::not_connected, "session '" + options_.client_id + "' is not connected"});
  }
}

std::string Session::next_message_id_locked() {
  return protocol::make_message_id(options_.client_id, ++sequence_);
}

std::uint64_t Session::barrier_locked(PendingOp op) {
  const auto id = ++ping_counter_;
  const bool info = op.kind == PendingOp::Kind::info;
  ops_.emplace(id, std::move(op));
  Frame ping{Command::ping, {{"ping-id", std::to_string(id)}}, {}};
  if (info) ping.set("info", "topics");
  send_locked(ping);
  return id;
}

void Session::connect(Completion done) {
  std::lock_guard lock(mu_);
  if (state_ != State::idle) {
    throw ClientError({ErrorCode::protocol_error, "connect() called twice"});
  }
  state_ = State::connecting;
  connect_done_ = std::move(done);
  Frame f{Command::connect, {{"client-id", options_.client_id}}, {}};
  if (options_.bridge) f.set("role", "bridge");
  send_locked(f);
}

std::string Session::publish_locked(std::string_view topic, std::string_view message_type,
                                    Document payload, const PublishOptions& opts) {
  require_open_locked();
  if (options_.schemas) {
    if (options_.schemas->latest(message_type) == nullptr) {
      throw ClientError({ErrorCode::unknown_message_type,
                         "unknown message type '" + std::string(message_type) + "'"});
    }
    auto violations = protocol::validate(payload, message_type, *options_.schemas, options_.validation);
    if (!violations.empty()) {
      throw ClientError({ErrorCode::schema_violation,
                         std::to_string(violations.size()) + " schema violation(s) in " +
                             std::string(message_type),
                         protocol::violation_lines(violations)});
    }
  }
  Envelope env;
  env.topic = std::string(topic);
  env.message_id = next_message_id_locked();
  env.sender_id = options_.client_id;
  env.message_type = std::string(message_type);
  env.timestamp_ms = now();
  env.correlation_id = opts.correlation_id;
  env.reply_to = opts.reply_to;
  env.payload = std::move(payload);
  send_locked(protocol::envelope_to_frame(env));
  return env.message_id;
}

std::string Session::publish(std::string_view topic, std::string_view message_type,
                             Document payload, const PublishOptions& opts) {
  std::lock_guard lock(mu_);
  return publish_locked(topic, message_type, std::move(payload), opts);
}

std::string Session::contribute(std::string_view domain, std::string_view message_type,
                                Document payload) {
  return publish(broker::contribution_topic(domain), message_type, std::move(payload));
}

void Session::publish_relayed(const Envelope& env) {
  std::lock_guard lock(mu_);
  require_open_locked();
  if (!options_.bridge) {
    throw ClientError({ErrorCode::protocol_error, "only bridge sessions relay envelopes"});
  }
  send_locked(protocol::envelope_to_frame(env));
}

std::string Session::subscribe(std::string_view topic, MessageHandler handler, Completion done) {
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = options_.client_id + ".s" + std::to_string(++subscription_counter_);
  }
  subscribe_as(id, topic, std::move(handler), std::move(done));
  return id;
}

void Session::subscribe_as(std::string_view subscription_id, std::string_view topic,
                           MessageHandler handler, Completion done) {
  std::lock_guard lock(mu_);
  require_open_locked();
  Sub sub;
  sub.topic = std::string(topic);
  sub.handler = std::move(handler);
  subs_[std::string(subscription_id)] = std::move(sub);
  send_locked(Frame{Command::subscribe,
                    {{"topic", std::string(topic)}, {"subscription-id", std::string(subscription_id)}},
                    {}});
  barrier_locked({PendingOp::Kind::subscribe, std::string(subscription_id), std::move(done), {}, {}});
}

void Session::unsubscribe(std::string_view subscription_id, Completion done) {
  std::lock_guard lock(mu_);
  require_open_locked();
  subs_.erase(std::string(subscription_id));
  send_locked(Frame{Command::unsubscribe, {{"subscription-id", std::string(subscription_id)}}, {}});
  barrier_locked({PendingOp::Kind::unsubscribe, std::string(subscription_id), std::move(done), {}, {}});
}

void Session::own_domain(std::string_view domain, ContributionHandler handler, Completion done) {
  std::lock_guard lock(mu_);
  require_open_locked();
  Sub sub;
  sub.topic = broker::contribution_topic(domain);
  sub.kind = SubKind::owner;
  sub.contribution = std::move(handler);
  sub.domain = std::string(domain);
  subs_[broker::owner_subscription_id(options_.client_id, domain)] = std::move(sub);
  send_locked(Frame{Command::own, {{"domain", std::string(domain)}}, {}});
  barrier_locked({PendingOp::Kind::own, std::string(domain), std::move(done), {}, {}});
}

void Session::ensure_reply_subscription_locked() {
  if (reply_subscribed_) return;
  reply_subscribed_ = true;
  const std::string id = options_.client_id + ".reply";
  Sub sub;
  sub.topic = broker::reply_topic(options_.client_id);
  sub.kind = SubKind::reply;
  subs_[id] = std::move(sub);
  send_locked(Frame{Command::subscribe, {{"topic", broker::reply_topic(options_.client_id)}, {"subscription-id", id}}, {}});
}

std::string Session::request(std::string_view topic, std::string_view message_type,
                             Document payload, std::int64_t timeout_ms, ReplyCompletion done) {
  std::lock_guard lock(mu_);
  require_open_locked();
  ensure_reply_subscription_locked();
  const std::string correlation = protocol::make_message_id(options_.client_id, sequence_ + 1);
  PublishOptions opts;
  opts.correlation_id = correlation;
  opts.reply_to = broker::reply_topic(options_.client_id);
  publish_locked(topic, message_type, std::move(payload), opts);
  requests_[correlation] = {now() + timeout_ms, std::move(done)};
  return correlation;
}

void Session::cancel_request(std::string_view correlation_id) {
  std::lock_guard lock(mu_);
  requests_.erase(std::string(correlation_id));
}

std::string Session::reply(const Envelope& request, std::string_view message_type, Document payload) {
  if (!request.reply_to) throw ClientError({ErrorCode::invalid_argument, "request has no reply-to"});
  PublishOptions opts;
  opts.correlation_id = request.correlation_id.value_or(request.message_id);
  return publish(*request.reply_to, message_type, std::move(payload), opts);
}

void Session::ack(std::string_view subscription_id, std::string_view message_id) {
  std::lock_guard lock(mu_);
  if (state_ != State::connected && state_ != State::connecting) return;
  send_locked(Frame{Command::ack,
                    {{"message-id", std::string(message_id)},
                     {"subscription-id", std::string(subscription_id)}},
                    {}});
}

void Session::set_ack_mode(AckMode mode) {
  std::lock_guard lock(mu_);
  options_.ack_mode = mode;
}

AckMode Session::ack_mode() const {
  std::lock_guard lock(mu_);
  return options_.ack_mode;
}

void Session::query_topics(std::function<void(const Status&, const Document&)> done) {
  std::lock_guard lock(mu_);
  require_open_locked();
  barrier_locked({PendingOp::Kind::info, {}, {}, std::move(done), {}});
}

void Session::barrier(Completion done) {
  std::lock_guard lock(mu_);
  require_open_locked();
  barrier_locked({PendingOp::Kind::barrier, {}, std::move(done), {}, {}});
}

void Session::disconnect() {
  std::lock_guard lock(mu_);
  if (state_ != State::connecting && state_ != State::connected) return;
  send_locked(Frame{Command::disconnect, {}, {}});
  state_ = State::closed;
}

void Session::set_error_callback(ErrorCallback callback) {
  std::lock_guard lock(mu_);
  on_error_ = std::move(callback);
}

void Session::report(std::vector<Work>& out, Status status, std::string ref) {
  if (!on_error_) return;
  out.push_back([cb = on_error_, status = std::move(status), ref = std::move(ref)] { cb(status, ref); });
}

void Session::run_owner(const Sub& sub, const std::string& subscription_id, const Envelope& env) {
  std::vector<OwnerOutput> outputs = sub.contribution(env);
  PublishOptions opts;
  opts.correlation_id = env.message_id;
  for (auto& o : outputs) {
    const std::string topic = o.target == OwnerOutput::Target::publication
                                  ? broker::publication_topic(sub.domain)
                                  : broker::rejection_topic(sub.domain);
    publish(topic, o.message_type, std::move(o.payload), opts);
  }
  (void)subscription_id;
}

Work Session::delivery_work(const Sub& sub, const std::string& subscription_id, Envelope env) {
  return [this, sub, subscription_id, env = std::move(env)] {
    try {
      if (sub.kind == SubKind::owner) {
        run_owner(sub, subscription_id, env);
      } else if (sub.handler) {
        sub.handler(env);
      }
    } catch (const std::exception& e) {
      ErrorCallback cb;
      {
        std::lock_guard lock(mu_);
        cb = on_error_;
      }
      if (cb) cb({ErrorCode::handler_error, e.what()}, env.message_id);
      return;
    }
    if (ack_mode() == AckMode::automatic) ack(subscription_id, env.message_id);
  };
}

Inbound Session::on_frame(const Frame& frame) {
  Inbound in;
  std::lock_guard lock(mu_);
  switch (frame.command) {
    case Command::connected: {
      if (state_ == State::connecting) state_ = State::connected;
      if (connect_done_) {
        in.control.push_back([done = std::move(connect_done_)] { done(Status::Ok()); });
        connect_done_ = nullptr;
      }
      break;
    }
    case Command::error: {
      Status status = status_from_error_frame(frame);
      if (state_ == State::connecting && frame.header("client-id")) {
        state_ = State::closed;
        if (connect_done_) {
          in.control.push_back([done = std::move(connect_done_), status] { done(status); });
          connect_done_ = nullptr;
        }
        break;
      }
      auto attach_to_op = [&](PendingOp::Kind kind, const std::string& key) {
        for (auto& [id, op] : ops_) {
          if (op.kind == kind && op.key == key && op.status.ok()) {
            op.status = status;
            return true;
          }
        }
        return false;
      };
      if (auto sub = frame.header("subscription-id")) {
        const std::string key(*sub);
        if (attach_to_op(PendingOp::Kind::subscribe, key)) {
          subs_.erase(key);
          break;
        }
        if (attach_to_op(PendingOp::Kind::unsubscribe, key)) break;
      }
      if (auto domain = frame.header("domain")) {
        if (attach_to_op(PendingOp::Kind::own, std::string(*domain))) {
          subs_.erase(broker::owner_subscription_id(options_.client_id, *domain));
          break;
        }
      }
      report(in.control, std::move(status), header_or_empty(frame, "ref-message-id"));
      break;
    }
    case Command::pong: {
      const auto id_text = header_or_empty(frame, "ping-id");
      std::uint64_t id = 0;
      try {
        id = std::stoull(id_text);
      } catch (const std::exception&) {
        break;
      }
      auto it = ops_.find(id);
      if (it == ops_.end()) break;
      PendingOp op = std::move(it->second);
      ops_.erase(it);
      if (op.kind == PendingOp::Kind::info) {
        Document doc;
        Status st = op.status;
        try {
          doc = protocol::parse_document(frame.body);
        } catch (const protocol::ProtocolError& e) {
          st = {ErrorCode::protocol_error, e.what()};
        }
        if (op.info_done) {
          in.control.push_back([done = std::move(op.info_done), st, doc = std::move(doc)] { done(st, doc); });
        }
      } else if (op.done) {
        in.control.push_back([done = std::move(op.done), st = op.status] { done(st); });
      }
      break;
    }
    case Command::message: {
      Envelope env;
      try {
        env = protocol::frame_to_envelope(frame);
      } catch (const protocol::ProtocolError& e) {
        report(in.control, {ErrorCode::protocol_error, e.what()}, header_or_empty(frame, "message-id"));
        break;
      }
      const std::string sub_id = header_or_empty(frame, "subscription-id");
      auto sub = subs_.find(sub_id);
      if (sub == subs_.end()) break;
      if (options_.schemas && options_.schemas->latest(env.message_type) != nullptr) {
        auto violations = protocol::validate(env.payload, env.message_type, *options_.schemas,
                                             options_.validation);
        if (!violations.empty()) {
          report(in.control,
                 {ErrorCode::schema_violation, "inbound " + env.message_type + " failed validation",
                  protocol::violation_lines(violations)},
                 env.message_id);
          break;
        }
      }
      if (sub->second.kind == SubKind::reply) {
        ReplyCompletion done;
        if (env.correlation_id) {
          if (auto r = requests_.find(*env.correlation_id); r != requests_.end()) {
            done = std::move(r->second.done);
            requests_.erase(r);
          }
        }
        in.control.push_back([this, done = std::move(done), sub_id, env = std::move(env)] {
          if (done) done(Status::Ok(), &env);
          ack(sub_id, env.message_id);
        });
        break;
      }
      in.deliveries.push_back(delivery_work(sub->second, sub_id, std::move(env)));
      break;
    }
    default:
      report(in.control,
             {ErrorCode::protocol_error,
              "unexpected " + std::string(protocol::command_name(frame.command)) + " from broker"},
             {});
      break;
  }
  return in;
}

std::vector<Work> Session::tick(std::int64_t now_ms) {
  std::vector<Work> out;
  std::lock_guard lock(mu_);
  for (auto it = requests_.begin(); it != requests_.end();) {
    if (it->second.deadline_ms <= now_ms) {
      out.push_back([done = std::move(it->second.done), id = it->first] {
        if (done) done({ErrorCode::timeout, "request " + id + " timed out"}, nullptr);
      });
      it = requests_.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

std::optional<std::int64_t> Session::next_timeout() const {
  std::lock_guard lock(mu_);
  std::optional<std::int64_t> best;
  for (const auto& [id, r] : requests_) {
    if (!best || r.deadline_ms < *best) best = r.deadline_ms;
  }
  return best;
}

std::vector<Work> Session::on_transport_closed() {
  std::vector<Work> out;
  std::lock_guard lock(mu_);
  const Status closed{ErrorCode::not_connected, "connection closed"};
  state_ = State::closed;
  if (connect_done_) {
    out.push_back([done = std::move(connect_done_), closed] { done(closed); });
    connect_done_ = nullptr;
  }
  for (auto& [id, op] : ops_) {
    if (op.kind == PendingOp::Kind::info) {
      if (op.info_done) out.push_back([done = std::move(op.info_done), closed] { done(closed, Document{}); });
    } else if (op.done) {
      out.push_back([done = std::move(op.done), closed] { done(closed); });
    }
  }
  ops_.clear();
  for (auto& [id, r] : requests_) {
    if (r.done) out.push_back([done = std::move(r.done), closed] { done(closed, nullptr); });
  }
  requests_.clear();
  return out;
}

}  // namespace acwp::client
