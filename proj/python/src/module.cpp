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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <set>
#include <string>

#include "acwp/broker/broker.hpp"
#include "acwp/protocol/document.hpp"
#include "acwp/protocol/envelope.hpp"
#include "acwp/protocol/errors.hpp"
#include "acwp/protocol/frame.hpp"
#include "acwp/protocol/schema.hpp"
#include "acwp/sim/agents.hpp"
#include "acwp/sim/scenario.hpp"
#include "acwp/sim/world.hpp"
#include "acwp/status.hpp"

namespace py = pybind11;
using namespace acwp;
using protocol::Document;
using protocol::Value;

namespace {

py::object decimal_type() {
  static py::object type = py::module_::import("decimal").attr("Decimal");
  return type;
}

py::object to_py(const Value& v) {
  switch (v.kind()) {
    case protocol::ValueKind::null: return py::none();
    case protocol::ValueKind::text: return py::str(v.as_text());
    case protocol::ValueKind::integer: return py::int_(v.as_integer());
    case protocol::ValueKind::decimal: return decimal_type()(v.as_decimal().to_string());
    case protocol::ValueKind::boolean: return py::bool_(v.as_boolean());
  }
  return py::none();
}

Value from_py(const py::handle& h) {
  if (h.is_none()) return Value::null();
  if (py::isinstance<py::bool_>(h)) return Value::boolean(h.cast<bool>());
  if (py::isinstance<py::int_>(h)) return Value::integer(h.cast<std::int64_t>());
  if (py::isinstance<py::str>(h)) return Value::text(h.cast<std::string>());
  if (py::isinstance(h, decimal_type()) || py::isinstance<py::float_>(h)) {
    const auto text = py::str(h).cast<std::string>();
    if (auto d = protocol::Decimal::parse(text)) return Value::decimal(*d);
    throw py::value_error("not a representable decimal: " + text);
  }
  throw py::type_error("unsupported value type: " + py::str(py::type::handle_of(h)).cast<std::string>());
}

py::dict to_dict(const Document& doc) {
  py::dict d;
  for (const auto& [path, value] : doc.entries()) d[py::str(path)] = to_py(value);
  return d;
}

Document from_dict(const py::dict& d) {
  Document doc;
  for (const auto& [k, v] : d) doc.add(k.cast<std::string>(), from_py(v));
  return doc;
}

py::dict envelope_dict(const protocol::Envelope& e) {
  py::dict d;
  d["topic"] = e.topic;
  d["message_id"] = e.message_id;
  d["sender_id"] = e.sender_id;
  d["message_type"] = e.message_type;
  d["timestamp_ms"] = e.timestamp_ms;
  d["correlation_id"] = e.correlation_id ? py::object(py::str(*e.correlation_id)) : py::object(py::none());
  d["hop_trace"] = e.hop_trace;
  d["payload"] = to_dict(e.payload);
  return d;
}

py::dict dlq_dict(const broker::DlqRecord& r) {
  py::dict d;
  d["topic"] = r.original_topic;
  d["message_id"] = r.original_message_id;
  d["subscription_id"] = r.failed_subscription_id;
  d["client_id"] = r.failed_client;
  d["reason"] = std::string(broker::dlq_reason_name(r.reason));
  return d;
}

class BrokerError : public std::runtime_error {
 public:
  BrokerError(const Status& st) : std::runtime_error(st.to_string()) {}
};

void raise_unless(const Status& st) {
  if (!st.ok()) throw BrokerError(st);
}

/// A broker driven by an explicit clock.
class PyBroker {
 public:
  PyBroker(const std::string& id, const std::optional<std::string>& schema_text) {
    broker::BrokerOptions o;
    o.id = id;
    if (schema_text) o.schemas = std::make_shared<protocol::SchemaSet>(protocol::parse_schema_set(*schema_text));
    o.clock = [this] { return now_; };
    broker_ = std::make_unique<broker::Broker>(o);
  }

  void declare_topic(const std::string& name) { raise_unless(broker_->declare_topic({name})); }
  void declare_domain(const std::string& domain, std::int64_t ack_deadline_ms) {
    raise_unless(broker_->declare_domain(domain, ack_deadline_ms));
  }
  void connect(const std::string& client) { raise_unless(broker_->connect(client)); }
  py::list disconnect(const std::string& client) {
    py::list out;
    for (const auto& r : broker_->disconnect(client)) out.append(dlq_dict(r));
    return out;
  }
  void register_owner(const std::string& client, const std::string& domain) {
    raise_unless(broker_->register_owner(client, domain));
  }
  void subscribe(const std::string& client, const std::string& topic, const std::string& sub) {
    raise_unless(broker_->subscribe(client, topic, sub));
  }
  std::string publish(const std::string& client, const std::string& topic, const std::string& type,
                      const py::dict& payload, const std::optional<std::string>& correlation_id) {
    protocol::Envelope e;
    e.topic = topic;
    e.sender_id = client;
    e.message_id = protocol::make_message_id(client, ++seq_[client]);
    e.message_type = type;
    e.timestamp_ms = now_;
    e.correlation_id = correlation_id;
    e.payload = from_dict(payload);
    const auto id = e.message_id;
    const auto st = broker_->publish(client, std::move(e));
    if (!st.ok()) {
      --seq_[client];
      throw BrokerError(st);
    }
    return id;
  }
  py::list dispatch(std::int64_t now_ms) {
    now_ = now_ms;
    py::list out;
    for (const auto& d : broker_->dispatch(now_ms)) {
      auto item = envelope_dict(d.envelope);
      item["client_id"] = d.client_id;
      item["subscription_id"] = d.subscription_id;
      item["deadline_ms"] = d.deadline_ms;
      out.append(item);
    }
    return out;
  }
  void ack(const std::string& client, const std::string& sub, const std::string& message_id) {
    raise_unless(broker_->ack(client, sub, message_id));
  }
  py::list sweep(std::int64_t now_ms) {
    now_ = now_ms;
    py::list out;
    for (const auto& r : broker_->sweep_deadlines(now_ms)) out.append(dlq_dict(r));
    return out;
  }
  py::dict stats(const std::string& topic) const {
    const auto s = broker_->stats(topic);
    py::dict d;
    d["published"] = s.published;
    d["delivered"] = s.delivered;
    d["acked"] = s.acked;
    d["dead_lettered"] = s.dead_lettered;
    d["dropped"] = s.dropped;
    return d;
  }
  std::size_t pending() const { return broker_->pending_count(); }

 private:
  std::unique_ptr<broker::Broker> broker_;
  std::int64_t now_ = 0;
  std::map<std::string, std::uint64_t> seq_;
};

py::bytes encode_frame(const std::string& command, const std::map<std::string, std::string>& headers,
                       const py::bytes& body) {
  protocol::Frame f;
  const auto c = protocol::command_from_name(command);
  if (!c) throw py::value_error("unknown command: " + command);
  f.command = *c;
  for (const auto& [k, v] : headers) f.set(k, v);
  f.body = body.cast<std::string>();
  return py::bytes(protocol::encode_frame(f));
}

py::list decode_frames(const py::bytes& data) {
  protocol::FrameDecoder decoder;
  decoder.feed(data.cast<std::string>());
  py::list out;
  while (auto f = decoder.next()) {
    out.append(py::make_tuple(std::string(protocol::command_name(f->command)),
                              std::map<std::string, std::string>(f->headers.begin(), f->headers.end()),
                              py::bytes(f->body)));
  }
  decoder.finish();
  return out;
}

std::vector<std::string> validate(const py::dict& doc, const std::string& type, const std::string& schema_text,
                                  bool strict) {
  const auto set = protocol::parse_schema_set(schema_text);
  return protocol::violation_lines(protocol::validate(
      from_dict(doc), type, set, strict ? protocol::ValidationMode::strict : protocol::ValidationMode::permissive));
}

py::dict run_simulation(const std::string& world_text, const std::string& scenario_text,
                        std::optional<std::uint64_t> seed) {
  auto config = sim::parse_world_config(protocol::parse_document(world_text));
  if (seed) config.seed = *seed;
  const auto script = sim::parse_scenario(scenario_text);
  auto world = sim::build_world(config);
  sim::run_scenario(*world, script);
  const auto report = sim::assert_converged(*world, "fpl");
  py::dict plans;
  for (const auto& [cs, fp] : world->owner_state().plans) plans[py::str(cs)] = to_dict(fp.to_document());
  py::dict out;
  out["log"] = world->log().to_text();
  out["events"] = world->log().size();
  out["converged"] = report.ok;
  out["diffs"] = report.diffs;
  out["plans"] = plans;
  return out;
}

class LegacyTranslator {
 public:
  py::tuple translate(const std::string& line) {
    auto c = sim::legacy_agent_translate(line, seen_);
    return py::make_tuple(c.message_type, to_dict(c.payload));
  }

 private:
  std::set<std::string> seen_;
};

}  // namespace

PYBIND11_MODULE(_acwp, m) {
  m.doc() = "Ownership-aware messaging core: codecs, validation, broker and simulation.";

  static py::exception<protocol::ProtocolError> protocol_error(m, "ProtocolError", PyExc_ValueError);
  py::register_exception<BrokerError>(m, "BrokerError", PyExc_RuntimeError);
  py::register_exception<sim::BadLegacyLine>(m, "BadLegacyLine", PyExc_ValueError);
  py::register_exception<sim::ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const protocol::ProtocolError& e) {
      std::string where = e.line() ? "line " + std::to_string(e.line()) + ": " : "";
      py::set_error(protocol_error, (where + e.what()).c_str());
    }
  });

  m.def("encode_document", [](const py::dict& d) { return protocol::encode_document(from_dict(d)); }, py::arg("doc"));
  m.def("parse_document", [](const std::string& text) { return to_dict(protocol::parse_document(text)); },
        py::arg("text"));
  m.def("canonical_document",
        [](const py::dict& d) { return protocol::encode_document(protocol::canonicalize(from_dict(d))); },
        py::arg("doc"));
  m.def("validate", &validate, py::arg("doc"), py::arg("message_type"), py::arg("schema_text"),
        py::arg("strict") = true);
  m.def("schema_types", [](const std::string& text) { return protocol::parse_schema_set(text).type_names(); },
        py::arg("schema_text"));
  m.def("encode_frame", &encode_frame, py::arg("command"), py::arg("headers"), py::arg("body") = py::bytes());
  m.def("decode_frames", &decode_frames, py::arg("data"));
  m.def("demo_schema_text", [] { return std::string(sim::demo_schema_text()); });
  m.def("run_simulation", &run_simulation, py::arg("world"), py::arg("scenario"), py::arg("seed") = py::none());

  py::class_<LegacyTranslator>(m, "LegacyTranslator")
      .def(py::init<>())
      .def("translate", &LegacyTranslator::translate, py::arg("line"));

  py::class_<PyBroker>(m, "Broker")
      .def(py::init<const std::string&, const std::optional<std::string>&>(), py::arg("id"),
           py::arg("schema_text") = py::none())
      .def("declare_topic", &PyBroker::declare_topic, py::arg("name"))
      .def("declare_domain", &PyBroker::declare_domain, py::arg("domain"),
           py::arg("ack_deadline_ms") = broker::kDefaultAckDeadlineMs)
      .def("connect", &PyBroker::connect, py::arg("client_id"))
      .def("disconnect", &PyBroker::disconnect, py::arg("client_id"))
      .def("register_owner", &PyBroker::register_owner, py::arg("client_id"), py::arg("domain"))
      .def("subscribe", &PyBroker::subscribe, py::arg("client_id"), py::arg("topic"), py::arg("subscription_id"))
      .def("publish", &PyBroker::publish, py::arg("client_id"), py::arg("topic"), py::arg("message_type"),
           py::arg("payload"), py::arg("correlation_id") = py::none())
      .def("dispatch", &PyBroker::dispatch, py::arg("now_ms"))
      .def("ack", &PyBroker::ack, py::arg("client_id"), py::arg("subscription_id"), py::arg("message_id"))
      .def("sweep", &PyBroker::sweep, py::arg("now_ms"))
      .def("stats", &PyBroker::stats, py::arg("topic"))
      .def_property_readonly("pending", &PyBroker::pending);
}
