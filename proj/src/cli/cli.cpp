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

#include "acwp/cli/cli.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "acwp/broker/config.hpp"
#include "acwp/federation/routing.hpp"
#include "acwp/net/bridge_runner.hpp"
#include "acwp/net/client.hpp"
#include "acwp/net/server.hpp"
#include "acwp/protocol/errors.hpp"
#include "acwp/protocol/schema_files.hpp"
#include "acwp/sim/flight_plan.hpp"
#include "acwp/sim/world.hpp"
#include "acwp/util/files.hpp"

namespace acwp::cli {

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

void install_signal_handlers() {
  g_stop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
}

/// Sleeps in short steps until `done` holds, a signal arrives or the
/// deadline passes. Returns `done()`.
bool wait_until(const std::function<bool()>& done, std::int64_t timeout_ms) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (!done()) {
    if (g_stop || (timeout_ms > 0 && std::chrono::steady_clock::now() >= deadline)) return done();
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return true;
}

std::string default_client_id(const std::string& verb) {
  return "cli-" + verb + "-" + std::to_string(::getpid());
}

protocol::Document read_document(const std::string& source, std::istream& in) {
  std::string text;
  if (source == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    text = util::read_file(source);
  }
  return protocol::parse_document(text);
}

client::SessionOptions session_options(const std::string& client_id) {
  client::SessionOptions opts;
  opts.client_id = client_id;
  opts.schemas = protocol::schemas_from_environment();
  return opts;
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

net::Endpoint endpoint_arg(const std::string& text) {
  try {
    return net::parse_endpoint(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void print_envelope(std::ostream& out, const protocol::Envelope& env) {
  out << protocol::encode_document(protocol::canonicalize(protocol::envelope_to_document(env))) << "\n";
  out.flush();
}

int report(std::ostream& err, const Status& st) {
  err << st.to_string() << "\n";
  for (const auto& v : st.violations()) err << "  " << v << "\n";
  return kExitRuntime;
}

// -- subcommands ---------------------------------------------------------------

int broker_serve(const std::string& config_file, const std::string& role, const std::string& listen,
                 std::ostream& out, std::ostream& err) {
  auto config = broker::load_broker_config(config_file);
  if (!listen.empty()) config.listen = listen;
  net::BrokerServer server(broker::build_broker(config), role);
  install_signal_handlers();
  const auto bound = server.start(endpoint_arg(config.listen));
  out << "listening " << bound.to_string() << std::endl;
  err << "broker " << config.id << " (" << role << ") ready\n";
  wait_until([] { return false; }, 0);
  server.stop();
  return kExitOk;
}

int bridge_run(const std::string& config_file, std::ostream& out) {
  auto config = net::load_bridge_config(config_file);
  auto rules = federation::load_routing_rules(util::read_file(config.rules_file), config.local_topics);
  net::LiveBridge bridge(config, std::move(rules));
  install_signal_handlers();
  bridge.start();
  if (wait_until([&] { return bridge.ready(); }, 10000)) {
    out << "bridge " << config.local_id << " <-> " << config.central_id << " ready" << std::endl;
  }
  wait_until([] { return false; }, 0);
  bridge.stop();
  return kExitOk;
}

int pub(const std::string& endpoint, const std::string& topic, const std::string& type,
        const std::string& doc_source, const std::string& client_id, std::ostream& out, std::ostream& err,
        std::istream& in) {
  auto doc = read_document(doc_source, in);
  auto client = net::BlockingClient::connect(endpoint_arg(endpoint), session_options(client_id));
  std::string id;
  Status st = client->publish_confirmed(topic, type, std::move(doc), &id);
  if (!st.ok()) return report(err, st);
  out << id << "\n";
  return kExitOk;
}

int sub(const std::string& endpoint, const std::string& topic, int count, std::int64_t timeout_ms,
        const std::string& client_id, std::ostream& out, std::ostream& err) {
  auto client = net::BlockingClient::connect(endpoint_arg(endpoint), session_options(client_id));
  std::mutex mu;
  int received = 0;
  client->set_error_callback([&](const Status& st, std::string_view) {
    std::lock_guard lock(mu);
    err << st.to_string() << "\n";
  });
  client->subscribe(topic, [&](const protocol::Envelope& env) {
    std::lock_guard lock(mu);
    if (count > 0 && received >= count) return;
    print_envelope(out, env);
    ++received;
  });
  err << "subscribed " << topic << "\n";
  install_signal_handlers();
  const bool done = wait_until(
      [&] {
        std::lock_guard lock(mu);
        return (count > 0 && received >= count) || !client->connected();
      },
      timeout_ms);
  std::lock_guard lock(mu);
  if (count > 0 && received < count) {
    err << (done ? "not-connected: connection closed" : "timeout: received " + std::to_string(received) +
                                                            " of " + std::to_string(count))
        << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int req(const std::string& endpoint, const std::string& topic, const std::string& type,
        const std::string& doc_source, std::int64_t timeout_ms, const std::string& client_id,
        std::ostream& out, std::istream& in) {
  auto doc = read_document(doc_source, in);
  auto client = net::BlockingClient::connect(endpoint_arg(endpoint), session_options(client_id));
  auto reply = client->request(topic, type, std::move(doc), timeout_ms);
  print_envelope(out, reply);
  return kExitOk;
}

int topics(const std::string& endpoint, const std::string& client_id, std::ostream& out) {
  auto client = net::BlockingClient::connect(endpoint_arg(endpoint), session_options(client_id));
  out << protocol::encode_document(protocol::canonicalize(client->topics()));
  return kExitOk;
}

int schema_lint(const std::vector<std::string>& files, std::ostream& out, std::ostream& err) {
  protocol::SchemaSet all;
  for (const auto& f : files) {
    try {
      all.merge(protocol::load_schema_file(f));
    } catch (const protocol::ProtocolError& e) {
      err << e.what() << "\n";
      return kExitRuntime;
    }
  }
  out << "ok: " << all.type_names().size() << " message types\n";
  return kExitOk;
}

int sim_run(const std::string& world_file, const std::string& scenario_file, std::optional<std::uint64_t> seed,
            const std::string& golden, const std::string& out_file, std::ostream& out, std::ostream& err) {
  auto config = sim::load_world_config(world_file);
  if (seed) config.seed = *seed;
  sim::Scenario script;
  try {
    script = sim::parse_scenario(util::read_file(scenario_file));
  } catch (const sim::ScenarioError& e) {
    err << scenario_file << ": " << e.what() << "\n";
    return kExitRuntime;
  }
  auto world = sim::build_world(config);
  const std::string text = sim::run_scenario(*world, script).to_text();
  if (!out_file.empty()) {
    std::ofstream f(out_file, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + out_file);
  } else if (golden.empty()) {
    out << text;
  }
  const auto fpl = sim::assert_converged(*world, "fpl");
  for (const auto& d : fpl.diffs) err << "diverged: " << d << "\n";
  if (!golden.empty()) {
    const std::string expected = util::read_file(golden);
    if (expected != text) {
      std::istringstream a(expected), b(text);
      std::string la, lb;
      std::size_t line = 0;
      for (;;) {
        ++line;
        const bool ha = static_cast<bool>(std::getline(a, la));
        const bool hb = static_cast<bool>(std::getline(b, lb));
        if (!ha && !hb) break;
        if (!ha || !hb || la != lb) {
          err << golden << ":" << line << ": log differs\n";
          err << "- " << (ha ? la : "<end of file>") << "\n";
          err << "+ " << (hb ? lb : "<end of file>") << "\n";
          break;
        }
      }
      return kExitRuntime;
    }
    out << "ok: " << world->log().size() << " events match " << golden << "\n";
  }
  return fpl.ok ? kExitOk : kExitRuntime;
}

int demo_owner(const std::string& endpoint, const std::string& client_id, int count, std::ostream& out,
               std::ostream& err) {
  client::SessionOptions opts = session_options(client_id);
  if (!opts.schemas) opts.schemas = sim::demo_schemas();
  auto client = net::BlockingClient::connect(endpoint_arg(endpoint), opts);
  std::mutex mu;
  sim::FplOwnerState state;
  int processed = 0;
  client->set_error_callback([&](const Status& st, std::string_view ref) {
    std::lock_guard lock(mu);
    err << st.to_string() << (ref.empty() ? "" : " (" + std::string(ref) + ")") << "\n";
  });
  client->own_domain("fpl", [&](const protocol::Envelope& c) {
    std::lock_guard lock(mu);
    auto result = sim::fpl_owner_apply(state, c);
    ++processed;
    err << "processed " << c.message_id << " (" << c.message_type << ")\n";
    return result.outputs;
  });
  try {
    client->subscribe("fpl.query", [&](const protocol::Envelope& q) {
      protocol::Document reply{{"found", protocol::Value::boolean(false)}};
      {
        std::lock_guard lock(mu);
        const auto* cs = q.payload.find("callsign");
        auto it = cs ? state.plans.find(cs->as_text()) : state.plans.end();
        if (it != state.plans.end()) {
          reply.set("found", protocol::Value::boolean(true));
          const auto record = it->second.to_document();
          for (const auto& [path, value] : record.entries()) reply.add("record." + path, value);
        }
      }
      if (q.reply_to) client->session().reply(q, "fpl.query_result", protocol::canonicalize(std::move(reply)));
    });
  } catch (const client::ClientError& e) {
    err << "fpl.query not served: " << e.what() << "\n";
  }
  out << "owner " << client_id << " ready" << std::endl;
  install_signal_handlers();
  wait_until(
      [&] {
        std::lock_guard lock(mu);
        return (count > 0 && processed >= count) || !client->connected();
      },
      0);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"ACWP message broker, bridge, client and simulator", "acwp"};
  app.require_subcommand(1);

  std::string config_file, role = "central", listen, endpoint, topic, type, doc_source, client_id;
  std::string world_file, scenario_file, golden, out_file;
  std::vector<std::string> files;
  int count = 0;
  std::int64_t timeout_ms = 0;
  std::int64_t req_timeout = client::kDefaultRequestTimeoutMs;
  std::uint64_t seed = 0;

  auto* broker_cmd = app.add_subcommand("broker", "Run a broker");
  broker_cmd->require_subcommand(1);
  auto* serve = broker_cmd->add_subcommand("serve", "Serve a broker over TCP");
  serve->add_option("--config", config_file, "Broker config file")->required();
  serve->add_option("--role", role, "central or local")->check(CLI::IsMember({"central", "local"}));
  serve->add_option("--listen", listen, "Override broker.listen (host:port)");

  auto* bridge_cmd = app.add_subcommand("bridge", "Run a bridge");
  bridge_cmd->require_subcommand(1);
  auto* bridge_run_cmd = bridge_cmd->add_subcommand("run", "Bridge a local broker to the central broker");
  bridge_run_cmd->add_option("--config", config_file, "Bridge config file")->required();

  auto* pub_cmd = app.add_subcommand("pub", "Publish one message");
  pub_cmd->add_option("endpoint", endpoint)->required();
  pub_cmd->add_option("topic", topic)->required();
  pub_cmd->add_option("type", type)->required();
  pub_cmd->add_option("doc", doc_source, "Document file, or - for stdin")->required();
  pub_cmd->add_option("--client-id", client_id);

  auto* sub_cmd = app.add_subcommand("sub", "Subscribe and print envelopes");
  sub_cmd->add_option("endpoint", endpoint)->required();
  sub_cmd->add_option("topic", topic)->required();
  sub_cmd->add_option("--count", count, "Exit after N messages")->check(CLI::NonNegativeNumber);
  sub_cmd->add_option("--timeout", timeout_ms, "Give up after ms (0 waits forever)")->check(CLI::NonNegativeNumber);
  sub_cmd->add_option("--client-id", client_id);

  auto* req_cmd = app.add_subcommand("req", "Send a request and print the reply");
  req_cmd->add_option("endpoint", endpoint)->required();
  req_cmd->add_option("topic", topic)->required();
  req_cmd->add_option("type", type)->required();
  req_cmd->add_option("doc", doc_source)->required();
  req_cmd->add_option("--timeout", req_timeout)->check(CLI::PositiveNumber);
  req_cmd->add_option("--client-id", client_id);

  auto* schema_cmd = app.add_subcommand("schema", "Schema tools");
  schema_cmd->require_subcommand(1);
  auto* lint = schema_cmd->add_subcommand("lint", "Check schema files");
  lint->add_option("files", files)->required();

  auto* topics_cmd = app.add_subcommand("topics", "List a broker's topics");
  topics_cmd->add_option("endpoint", endpoint)->required();
  topics_cmd->add_option("--client-id", client_id);

  auto* sim_cmd = app.add_subcommand("sim", "Simulation");
  sim_cmd->require_subcommand(1);
  auto* sim_run_cmd = sim_cmd->add_subcommand("run", "Run a scenario and print the event log");
  sim_run_cmd->add_option("world", world_file)->required();
  sim_run_cmd->add_option("scenario", scenario_file)->required();
  auto* seed_opt = sim_run_cmd->add_option("--seed", seed);
  sim_run_cmd->add_option("--golden", golden, "Compare against this log; exit 1 on difference");
  sim_run_cmd->add_option("--out", out_file, "Write the log to a file");

  auto* demo_cmd = app.add_subcommand("demo", "Demo components");
  demo_cmd->require_subcommand(1);
  auto* owner_cmd = demo_cmd->add_subcommand("owner", "Run the flight plan owner");
  owner_cmd->add_option("endpoint", endpoint)->required();
  owner_cmd->add_option("--client-id", client_id);
  owner_cmd->add_option("--count", count, "Exit after N contributions")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (serve->parsed()) return broker_serve(config_file, role, listen, out, err);
    if (bridge_run_cmd->parsed()) return bridge_run(config_file, out);
    if (pub_cmd->parsed()) {
      return pub(endpoint, topic, type, doc_source, client_id.empty() ? default_client_id("pub") : client_id, out,
                 err, in);
    }
    if (sub_cmd->parsed()) {
      return sub(endpoint, topic, count, timeout_ms, client_id.empty() ? default_client_id("sub") : client_id, out,
                 err);
    }
    if (req_cmd->parsed()) {
      return req(endpoint, topic, type, doc_source, req_timeout,
                 client_id.empty() ? default_client_id("req") : client_id, out, in);
    }
    if (lint->parsed()) return schema_lint(files, out, err);
    if (topics_cmd->parsed()) return topics(endpoint, client_id.empty() ? default_client_id("topics") : client_id, out);
    if (sim_run_cmd->parsed()) {
      return sim_run(world_file, scenario_file, seed_opt->count() > 0 ? std::optional(seed) : std::nullopt, golden,
                     out_file, out, err);
    }
    if (owner_cmd->parsed()) {
      return demo_owner(endpoint, client_id.empty() ? "fdps" : client_id, count, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const client::ClientError& e) {
    return report(err, e.status());
  } catch (const protocol::ProtocolError& e) {
    err << "protocol-error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const federation::RoutingError& e) {
    err << "routing rules: line " << e.line() << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << "usage: no command\n";
  return kExitUsage;
}

}  // namespace acwp::cli
