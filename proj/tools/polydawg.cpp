#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "polydawg/endpoint/bench.hpp"
#include "polydawg/endpoint/loader.hpp"
#include "polydawg/endpoint/serialize.hpp"
#include "polydawg/endpoint/server.hpp"
#include "polydawg/error.hpp"

namespace {

using namespace polydawg;

endpoint::QueryServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
}

/// Restores the catalog when one is configured, then fills the engines.
void prepare(Polystore& store, const endpoint::ServerConfig& config, bool load_data) {
  if (!config.catalog_path.empty() && std::filesystem::exists(config.catalog_path)) {
    store.open(config.catalog_path);
    spdlog::info("catalog restored from {}", config.catalog_path);
  }
  if (load_data) {
    const auto summary = endpoint::load_demo_dataset(store, true);
    for (const auto& [name, n] : summary.objects) spdlog::info("loaded {} ({})", name, n);
  }
}

void save(const Polystore& store, const endpoint::ServerConfig& config) {
  if (!config.catalog_path.empty()) store.save(config.catalog_path);
}

}  // namespace

int main(int argc, char** argv) {
  endpoint::ServerConfig config;
  CLI::App app{"polydawg: polystore query middleware"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> catalog_path, log_level, host;
  std::optional<int> port;
  std::optional<std::size_t> workers;
  bool training = false;
  app.add_option("--catalog", catalog_path, "Catalog persistence file");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, err, critical, off");
  app.add_option("--workers", workers, "Executor worker threads");

  auto* serve = app.add_subcommand("serve", "Serve POST /bigdawg/query over HTTP");
  bool no_load = false;
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 for ephemeral)");
  serve->add_flag("--training", training, "Measure every plan for each query");
  serve->add_flag("--no-load", no_load, "Do not load the demo dataset");

  auto* repl = app.add_subcommand("repl", "Interactive query loop");
  repl->add_flag("--training", training, "Measure every plan for each query");
  repl->add_flag("--no-load", no_load, "Do not load the demo dataset");

  auto* load = app.add_subcommand("load", "Load the demo dataset and save the catalog");
  bool force = false;
  std::vector<std::string> replicas;
  load->add_flag("--force", force, "Reload even when data is present");
  load->add_option("--replica", replicas, "Add a relational replica engine with this name");

  auto* bench = app.add_subcommand("bench", "Run each query N times and report span breakdowns");
  std::string queries_file, waterfall_path = "waterfall.csv", distribution_path = "distribution.csv";
  std::size_t runs = 50;
  bench->add_option("--queries", queries_file, "File of `name<TAB>query` lines (default: demo)");
  bench->add_option("--runs,-n", runs, "Runs per query")->check(CLI::PositiveNumber);
  bench->add_option("--waterfall", waterfall_path, "Per-task waterfall CSV output");
  bench->add_option("--distribution", distribution_path, "Per-query distribution CSV output");

  auto* admin = app.add_subcommand("admin", "Catalog administration");
  std::vector<std::string> admin_args;
  admin->add_option("args", admin_args, "list <table> | status | add-engine ... | add-database ... "
                                        "| add-object ... | add-shim ... | add-cast ...")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    endpoint::apply_env(config, endpoint::process_env());
    if (catalog_path) config.catalog_path = *catalog_path;
    if (log_level) config.log_level = *log_level;
    if (workers) config.workers = *workers;
    if (host) config.host = *host;
    if (port) config.port = *port;
    if (training) config.training = true;
    endpoint::validate(config);

    spdlog::set_default_logger(spdlog::stderr_color_mt("polydawg"));
    spdlog::set_level(spdlog::level::from_str(config.log_level));

    Polystore store(config.workers);
    if (*serve) {
      prepare(store, config, !no_load);
      endpoint::QueryServer server(store, config);
      const int bound = server.bind();
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << config.host << ":" << bound << std::endl;
      server.listen();
      g_server = nullptr;
      save(store, config);
    } else if (*repl) {
      prepare(store, config, !no_load);
      endpoint::run_repl(store, std::cin, std::cout, config.training);
      save(store, config);
    } else if (*load) {
      prepare(store, config, false);
      const auto summary = endpoint::load_demo_dataset(store, force);
      for (const auto& [name, n] : summary.objects) std::cout << name << "\t" << n << "\n";
      for (const auto& r : replicas) {
        std::cout << "replica " << r << "\tengine " << endpoint::add_relational_replica(store, r)
                  << "\n";
      }
      save(store, config);
    } else if (*bench) {
      prepare(store, config, true);
      std::vector<endpoint::BenchQuery> queries = endpoint::demo_queries();
      if (!queries_file.empty()) {
        std::ifstream in(queries_file);
        if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + queries_file);
        queries = endpoint::read_queries(in);
      }
      const auto report = endpoint::run_bench(store, queries, runs);
      std::cout << endpoint::format_report(report);
      write_file(waterfall_path, endpoint::waterfall_csv(report));
      write_file(distribution_path, endpoint::distribution_csv(report));
      save(store, config);
    } else if (*admin) {
      prepare(store, config, false);
      store.attach_engines();
      if (endpoint::run_admin(store, admin_args, std::cout)) save(store, config);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
