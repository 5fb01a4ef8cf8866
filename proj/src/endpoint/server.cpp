#include "polydawg/endpoint/server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "polydawg/endpoint/serialize.hpp"
#include "polydawg/error.hpp"
#include "polydawg/text_util.hpp"

extern char** environ;

namespace polydawg::endpoint {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, key + ": not a number: '" + text + "'");
  }
  return v;
}

bool parse_flag(const std::string& key, const std::string& text) {
  const std::string t = to_lower(text);
  if (t == "1" || t == "true" || t == "on" || t == "yes") return true;
  if (t == "0" || t == "false" || t == "off" || t == "no") return false;
  throw Error(ErrorCode::InvalidArgument, key + ": not a flag: '" + text + "'");
}

int to_int(const std::string& what, const std::string& text) { return parse_number<int>(what, text); }

}  // namespace

void apply_env(ServerConfig& config, const std::map<std::string, std::string>& env) {
  auto get = [&](const char* key) -> const std::string* {
    auto it = env.find(key);
    return it == env.end() ? nullptr : &it->second;
  };
  if (auto v = get("POLYDAWG_HOST")) config.host = *v;
  if (auto v = get("POLYDAWG_PORT")) config.port = parse_number<int>("POLYDAWG_PORT", *v);
  if (auto v = get("POLYDAWG_CATALOG")) config.catalog_path = *v;
  if (auto v = get("POLYDAWG_TRAINING")) config.training = parse_flag("POLYDAWG_TRAINING", *v);
  if (auto v = get("POLYDAWG_WORKERS")) {
    config.workers = parse_number<std::size_t>("POLYDAWG_WORKERS", *v);
  }
  if (auto v = get("POLYDAWG_LOG_LEVEL")) config.log_level = *v;
  validate(config);
}

std::map<std::string, std::string> process_env() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv = *e;
    const auto eq = kv.find('=');
    if (eq != std::string::npos) out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

void validate(const ServerConfig& config) {
  if (config.port < 0 || config.port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "port out of range: " + std::to_string(config.port));
  }
  if (config.workers == 0) throw Error(ErrorCode::InvalidArgument, "workers must be positive");
  if (spdlog::level::from_str(config.log_level) == spdlog::level::off &&
      config.log_level != "off") {
    throw Error(ErrorCode::InvalidArgument, "unknown log level '" + config.log_level + "'");
  }
}

HttpReply answer(Polystore& store, const std::string& query, bool training) {
  try {
    return {200, serialize_result(store.query(query, training).result)};
  } catch (const Error& e) {
    std::string body = e.what();
    return {is_parse_error(e.code()) ? 400 : 500, body + "\n"};
  } catch (const std::exception& e) {
    return {500, std::string("internal: ") + e.what() + "\n"};
  }
}

QueryServer::QueryServer(Polystore& store, ServerConfig config)
    : store_(store), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  validate(config_);
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server_->Post("/bigdawg/query", [this](const httplib::Request& req, httplib::Response& res) {
    const HttpReply reply = answer(store_, req.body, config_.training);
    spdlog::info("POST /bigdawg/query {} {}B", reply.status, reply.body.size());
    res.status = reply.status;
    res.set_content(reply.body, reply.status == 200 ? "text/tab-separated-values" : "text/plain");
  });
}

QueryServer::~QueryServer() { stop(); }

int QueryServer::bind() {
  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
    if (port < 0) port = 0;
  } else if (!server_->bind_to_port(config_.host, port)) {
    port = 0;
  }
  if (port == 0) {
    throw Error(ErrorCode::BindFailure,
                "cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  return port;
}

void QueryServer::listen() { server_->listen_after_bind(); }

void QueryServer::stop() {
  if (server_) server_->stop();
}

namespace {

/// Paren depth of `text` outside single- and double-quoted strings.
int paren_depth(const std::string& text) {
  int depth = 0;
  char quote = 0;
  for (char c : text) {
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      --depth;
    }
  }
  return depth;
}

}  // namespace

void run_repl(Polystore& store, std::istream& in, std::ostream& out, bool training, bool prompt) {
  bool timing = false;
  std::string pending;
  std::string line;
  auto show_prompt = [&] {
    if (prompt) out << (pending.empty() ? "polydawg> " : "     ...> ") << std::flush;
  };
  show_prompt();
  while (std::getline(in, line)) {
    if (pending.empty()) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) {
        show_prompt();
        continue;
      }
      const std::string cmd = line.substr(first);
      if (cmd.rfind("\\", 0) == 0) {
        const auto words = split(cmd, ' ');
        if (words[0] == "\\q") return;
        if (words[0] == "\\timing" && words.size() == 2 && (words[1] == "on" || words[1] == "off")) {
          timing = words[1] == "on";
          out << "timing " << words[1] << "\n";
        } else {
          out << "error: unknown command " << words[0] << "\n";
        }
        show_prompt();
        continue;
      }
    }
    pending += pending.empty() ? line : "\n" + line;
    if (paren_depth(pending) > 0) {
      show_prompt();
      continue;
    }
    try {
      const Response r = store.query(pending, training);
      out << serialize_result(r.result);
      for (const auto& w : r.warnings) out << "warning: " << w << "\n";
      if (timing) out << format_spans(r.spans, r.elapsed_ms);
    } catch (const Error& e) {
      out << "error: " << e.what();
      out << "\n";
    } catch (const std::exception& e) {
      out << "error: " << e.what() << "\n";
    }
    pending.clear();
    show_prompt();
  }
  if (prompt) out << "\n";
}

bool run_admin(Polystore& store, const std::vector<std::string>& args, std::ostream& out) {
  auto& c = store.catalog();
  auto need = [&](std::size_t lo, std::size_t hi, const char* usage) {
    if (args.size() < lo || args.size() > hi) {
      throw Error(ErrorCode::InvalidArgument, std::string("usage: admin ") + usage);
    }
  };
  if (args.empty()) throw Error(ErrorCode::InvalidArgument, "usage: admin <command> ...");
  const std::string& cmd = args[0];
  if (cmd == "list") {
    need(2, 64, "list <table> [column...]");
    bql::CatalogQuery q;
    q.table = args[1];
    q.columns.assign(args.begin() + 2, args.end());
    out << serialize_result(ResultSet{c.query(q)});
    return false;
  }
  if (cmd == "status") {
    need(1, 1, "status");
    for (const auto& e : c.snapshot().engines) {
      const auto island = c.island_of(e.engine_id);
      const bool up = store.registry().contains(e.engine_id);
      const std::size_t objects = up ? store.registry().get(e.engine_id)->object_names().size() : 0;
      out << e.engine_id << "\t" << e.name << "\t" << (island ? to_string(*island) : "none")
          << "\t" << (up ? "up" : "down") << "\tobjects=" << objects << "\n";
    }
    return false;
  }
  int id = 0;
  if (cmd == "add-engine") {
    need(4, 5, "add-engine <name> <host> <port> [properties]");
    id = c.register_engine(args[1], args[2], to_int("port", args[3]), args.size() > 4 ? args[4] : "");
  } else if (cmd == "add-database") {
    need(5, 5, "add-database <engine_id> <name> <userid> <password>");
    id = c.register_database(to_int("engine_id", args[1]), args[2], args[3], args[4]);
  } else if (cmd == "add-object") {
    need(5, 5, "add-object <name> <field,field...> <logical_db> <physical_db>");
    id = c.register_object(args[1], split(args[2], ','), to_int("logical_db", args[3]),
                           to_int("physical_db", args[4]));
  } else if (cmd == "add-shim") {
    need(3, 3, "add-shim <relational|array|text> <engine_id>");
    const auto island = bql::parse_island(args[1]);
    if (!island) throw Error(ErrorCode::InvalidArgument, "unknown island '" + args[1] + "'");
    id = c.register_shim(*island, to_int("engine_id", args[2]));
  } else if (cmd == "add-cast") {
    need(3, 4, "add-cast <src_engine_id> <dst_engine_id> [access_method]");
    id = c.register_cast(to_int("src_engine_id", args[1]), to_int("dst_engine_id", args[2]),
                         args.size() > 3 ? args[3] : "csv");
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown admin command '" + cmd + "'");
  }
  out << id << "\n";
  return true;
}

}  // namespace polydawg::endpoint
