#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "polydawg/polystore.hpp"

namespace httplib {
class Server;
}

namespace polydawg::endpoint {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds an ephemeral port
  std::string catalog_path;
  bool training = false;
  std::size_t workers = 4;
  std::string log_level = "info";
};

/// Applies POLYDAWG_HOST, POLYDAWG_PORT, POLYDAWG_CATALOG, POLYDAWG_TRAINING,
/// POLYDAWG_WORKERS and POLYDAWG_LOG_LEVEL from `env`. Throws InvalidArgument
/// on malformed values or an out-of-range port.
void apply_env(ServerConfig& config, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> process_env();
void validate(const ServerConfig& config);

struct HttpReply {
  int status = 200;
  std::string body;
};

/// Runs one query and maps the outcome to an HTTP reply: 200 with the
/// serialized result, 400 for parse errors, 500 for anything else.
HttpReply answer(Polystore& store, const std::string& query, bool training);

/// Serves POST /bigdawg/query.
class QueryServer {
 public:
  QueryServer(Polystore& store, ServerConfig config);
  ~QueryServer();

  /// Binds the listening socket; returns the bound port. Throws BindFailure.
  int bind();
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  Polystore& store_;
  ServerConfig config_;
  std::unique_ptr<httplib::Server> server_;
};

/// Interactive loop over `in`. Statements end when parentheses balance.
/// `\timing on|off` toggles the span table; `\q` quits.
void run_repl(Polystore& store, std::istream& in, std::ostream& out, bool training,
              bool prompt = true);

/// Admin commands: list <table>, status, add-engine, add-database,
/// add-object, add-shim, add-cast. Returns true when the catalog changed.
bool run_admin(Polystore& store, const std::vector<std::string>& args, std::ostream& out);

}  // namespace polydawg::endpoint
