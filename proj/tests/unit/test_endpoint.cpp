#include <sstream>
#include <thread>

#include "common.hpp"
#include "demo.hpp"
#include "doctest.h"
#include "httplib.h"
#include "polydawg/endpoint/bench.hpp"
#include "polydawg/endpoint/serialize.hpp"
#include "polydawg/endpoint/server.hpp"

using namespace polydawg;
using namespace polydawg::endpoint;
using testing::error_of;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string repl(Polystore& s, const std::string& input, bool prompt = false) {
  std::istringstream in(input);
  std::ostringstream out;
  run_repl(s, in, out, false, prompt);
  return out.str();
}

/// Server on an ephemeral port, listening on a background thread.
struct LiveServer {
  explicit LiveServer(Polystore& store) : server(store, config()) {
    port = server.bind();
    thread = std::thread([this] { server.listen(); });
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  static ServerConfig config() {
    ServerConfig c;
    c.port = 0;
    return c;
  }
  httplib::Result post(const std::string& body) const {
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(30, 0);
    return client.Post("/bigdawg/query", body, "text/plain");
  }
  QueryServer server;
  int port = 0;
  std::thread thread;
};

}  // namespace

TEST_SUITE("endpoint") {

TEST_CASE("relational results serialize as TSV with nulls and escapes") {
  RelationalTable t;
  t.columns = {{"id", ScalarType::Int64}, {"note", ScalarType::String}};
  t.rows = {{Value(std::int64_t{1}), Value(std::string("a\tb"))},
            {Value(std::int64_t{2}), Value::null()}};
  CHECK(serialize_result(ResultSet{t}) == "id\tnote\n1\ta\\tb\n2\t\\N\n");
}

TEST_CASE("array and text results serialize in key order") {
  ArrayObject a;
  a.schema.dimensions = {{"i", 0, 9, 10, 0}};
  a.schema.attributes = {{"v", ScalarType::Int32}};
  a.cells[{3}] = {Value(std::int32_t{30})};
  a.cells[{1}] = {Value(std::int32_t{10})};
  CHECK(serialize_result(ResultSet{a}) == "i\tv\n1\t10\n3\t30\n");

  TextEntries e{{{"r1", "log", "event", 5}, "line\none"}};
  CHECK(serialize_result(ResultSet{e}) == "row\tcf\tcq\tts\tvalue\nr1\tlog\tevent\t5\tline\\none\n");
}

TEST_CASE("span tables list every task with its share") {
  const std::vector<TaskSpan> spans{{task::kOptimization, 0, 1}, {task::kRelationalQuery, 1, 4}};
  const auto text = format_spans(spans, 4);
  const auto rows = lines_of(text);
  REQUIRE(rows.size() >= 3);
  CHECK(text.find(task::kOptimization) != std::string::npos);
  CHECK(text.find("75.0%") != std::string::npos);
}

TEST_CASE("the demo dataset loads once and resolves every object") {
  Polystore s;
  const auto summary = load_demo_dataset(s);
  CHECK(summary.registered);
  CHECK(summary.objects.size() == 4);
  for (const char* name : {"mimic2v26.d_patients", "mimic2v26.poe_order", "myarray", "mimic_logs"}) {
    CHECK_NOTHROW(s.catalog().resolve_object(name));
  }
  CHECK(error_of([&] { load_demo_dataset(s); }) == ErrorCode::AlreadyLoaded);
  const auto again = load_demo_dataset(s, true);
  CHECK_FALSE(again.registered);
  CHECK(again.objects == summary.objects);

  const auto all = s.query("bdarray(scan(myarray))").result.cardinality();
  const auto some = s.query(testing::kArrayFilter).result.cardinality();
  CHECK(some > 0);
  CHECK(some < all);
}

TEST_CASE("the demo dataset is deterministic for a seed") {
  Polystore a;
  Polystore b;
  load_demo_dataset(a);
  load_demo_dataset(b);
  for (const char* q : {testing::kLimit4, testing::kArrayFilter, testing::kTextRange}) {
    CHECK(serialize_result(a.query(q).result) == serialize_result(b.query(q).result));
  }
}

TEST_CASE("reloading a saved catalog refills replica engines") {
  testing::TempPath path("replica_catalog");
  {
    Polystore s;
    load_demo_dataset(s);
    add_relational_replica(s, "postgres_r1");
    s.save(path.str());
  }
  Polystore s;
  s.open(path.str());
  CHECK_FALSE(load_demo_dataset(s).registered);
  const int replica = s.catalog().engine_by_name("postgres_r1")->engine_id;
  CHECK(s.registry().get(replica)->has_object("mimic2v26.d_patients"));
  CHECK(s.registry().get(replica)->has_object("mimic2v26.poe_order"));
  const auto r = s.query(testing::kLimit4, true);
  CHECK(r.plan_count == 2);
  CHECK(r.result.table().rows.size() == 4);
}

TEST_CASE("query files accept named and bare lines") {
  std::istringstream in("# workload\n\nfirst\tbdrel(select 1)\nbdrel(select 2)\n");
  const auto qs = read_queries(in);
  REQUIRE(qs.size() == 2);
  CHECK(qs[0].name == "first");
  CHECK(qs[0].text == "bdrel(select 1)");
  CHECK(qs[1].text == "bdrel(select 2)");
  CHECK_FALSE(qs[1].name.empty());
}

TEST_CASE("quantiles interpolate linearly") {
  const auto d = summarize({4, 1, 3, 2, 5});
  CHECK(d.min == 1);
  CHECK(d.q1 == 2);
  CHECK(d.median == 3);
  CHECK(d.q3 == 4);
  CHECK(d.max == 5);
  CHECK(summarize({1, 2}).median == doctest::Approx(1.5));
  CHECK(summarize({1, 2, 3, 4}).q1 == doctest::Approx(1.75));
}

TEST_CASE("a single bench run collapses the distribution and writes CSVs") {
  auto s = testing::demo_store();
  const std::vector<BenchQuery> qs{{"chain", testing::kCastChain}, {"broken", "bdrel(select"}};
  const auto report = run_bench(*s, qs, 1);
  REQUIRE(report.queries.size() == 2);
  const auto& q = report.queries[0];
  CHECK(q.runs == 1);
  CHECK(q.stats.min == q.stats.median);
  CHECK(q.stats.max == q.stats.median);
  CHECK(q.execution_fraction > 0);
  CHECK(q.execution_fraction <= 1.0 + 1e-9);
  CHECK(q.error.empty());
  CHECK_FALSE(report.queries[1].error.empty());

  const auto dist = lines_of(distribution_csv(report));
  CHECK(dist[0] == "query,runs,min_ms,q1_ms,median_ms,q3_ms,max_ms");
  CHECK(dist.size() == 2);
  const auto wf = lines_of(waterfall_csv(report));
  CHECK(wf[0] == "query,task,start_ms,end_ms,duration_ms,fraction");
  CHECK(wf.size() == 1 + q.waterfall.size());
  CHECK(format_report(report).find("chain") != std::string::npos);
}

TEST_CASE("the demo workload pairs migration queries with local ones") {
  const auto qs = demo_queries();
  CHECK(qs.size() == 8);
  auto s = testing::demo_store();
  for (const auto& q : qs) CHECK_NOTHROW(s->query(q.text));
}

TEST_CASE("answers map errors to status codes") {
  auto s = testing::demo_store();
  CHECK(answer(*s, testing::kLimit4, false).status == 200);
  const auto bad = answer(*s, "bdrel(", false);
  CHECK(bad.status == 400);
  CHECK(bad.body.find("SyntaxError") != std::string::npos);
  CHECK(answer(*s, "bdrel(select * from nowhere)", false).status == 500);
}

TEST_CASE("the HTTP endpoint serves queries") {
  auto s = testing::demo_store();
  LiveServer server(*s);
  CHECK(server.port > 0);

  auto ok = server.post(testing::kLimit4);
  REQUIRE(ok);
  CHECK(ok->status == 200);
  CHECK(lines_of(ok->body).size() == 5);

  auto bad = server.post("bdrel(");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  auto cast = server.post(testing::kCastChain);
  REQUIRE(cast);
  CHECK(cast->status == 200);
  CHECK(lines_of(cast->body).size() == 6);

  httplib::Client client("127.0.0.1", server.port);
  auto missing = client.Get("/bigdawg/query");
  REQUIRE(missing);
  CHECK(missing->status != 200);
}

TEST_CASE("concurrent HTTP requests all succeed with identical bodies") {
  auto s = testing::demo_store();
  LiveServer server(*s);
  const std::string expected = answer(*s, testing::kCastChain, false).body;
  std::vector<std::thread> clients;
  std::atomic<int> good{0};
  for (int i = 0; i < 8; ++i) {
    clients.emplace_back([&] {
      auto r = server.post(testing::kCastChain);
      if (r && r->status == 200 && r->body == expected) ++good;
    });
  }
  for (auto& c : clients) c.join();
  CHECK(good == 8);
}

TEST_CASE("a second server on the same port fails to bind") {
  auto s = testing::demo_store();
  LiveServer first(*s);
  ServerConfig c;
  c.port = first.port;
  QueryServer second(*s, c);
  CHECK(error_of([&] { second.bind(); }) == ErrorCode::BindFailure);
}

TEST_CASE("the repl prints what the HTTP endpoint returns") {
  auto s = testing::demo_store();
  const auto out = repl(*s, std::string(testing::kArrayFilter) + "\n");
  CHECK(out == answer(*s, testing::kArrayFilter, false).body);

  const auto multi = repl(*s, std::string(testing::kCastChain) + "\n");
  CHECK(multi == answer(*s, testing::kCastChain, false).body);
}

TEST_CASE("repl commands, errors and end of input") {
  auto s = testing::demo_store();
  const auto timed = repl(*s, "\\timing on\n" + std::string(testing::kLimit4) + "\n\\q\n" +
                                  testing::kLimit4 + "\n");
  CHECK(timed.find("timing on") != std::string::npos);
  CHECK(timed.find(task::kOptimization) != std::string::npos);
  CHECK(lines_of(timed).size() < 20);

  const auto err = repl(*s, "bdrel(select * from nowhere)\n");
  CHECK(err.rfind("error: ", 0) == 0);

  const auto prompted = repl(*s, "bdrel(select *\nfrom mimic2v26.d_patients limit 1)\n", true);
  CHECK(prompted.find("polydawg> ") != std::string::npos);
  CHECK(prompted.find("...> ") != std::string::npos);

  const auto quoted =
      repl(*s, "bdrel(select subject_id from mimic2v26.d_patients where sex = ')')\n");
  CHECK(quoted == "subject_id\n");
}

TEST_CASE("admin lists, reports status and registers entries") {
  auto s = testing::demo_store();
  std::ostringstream list;
  CHECK_FALSE(run_admin(*s, {"list", "objects"}, list));
  CHECK(list.str() == serialize_result(s->query(testing::kCatalogObjects).result));

  std::ostringstream status;
  run_admin(*s, {"status"}, status);
  const auto rows = lines_of(status.str());
  CHECK(rows.size() == 4);
  CHECK(status.str().find("postgres0\tnone\t") != std::string::npos);
  CHECK(status.str().find("scidb\tarray\tup") != std::string::npos);

  std::ostringstream added;
  const int engine = s->catalog().engine_by_name("postgres1")->engine_id;
  CHECK(run_admin(*s, {"add-database", std::to_string(engine), "extra", "u", "p"}, added));
  const int db = std::stoi(added.str());
  std::ostringstream obj;
  CHECK(run_admin(*s, {"add-object", "extra_obj", "a,b", std::to_string(db), std::to_string(db)}, obj));
  CHECK_NOTHROW(s->catalog().resolve_object("extra_obj"));

  std::ostringstream sink;
  CHECK(error_of([&] { run_admin(*s, {"add-object", "x", "a", "999", "999"}, sink); }) ==
        ErrorCode::UnknownDatabase);
  CHECK(error_of([&] { run_admin(*s, {"bogus"}, sink); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([&] { run_admin(*s, {"add-engine", "x"}, sink); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("server settings come from the environment") {
  ServerConfig c;
  apply_env(c, {{"POLYDAWG_HOST", "0.0.0.0"},
                {"POLYDAWG_PORT", "9090"},
                {"POLYDAWG_TRAINING", "true"},
                {"POLYDAWG_WORKERS", "2"},
                {"POLYDAWG_LOG_LEVEL", "debug"},
                {"POLYDAWG_CATALOG", "/tmp/x.cat"},
                {"UNRELATED", "1"}});
  CHECK(c.host == "0.0.0.0");
  CHECK(c.port == 9090);
  CHECK(c.training);
  CHECK(c.workers == 2);
  CHECK(c.log_level == "debug");
  CHECK(c.catalog_path == "/tmp/x.cat");
  CHECK_NOTHROW(validate(c));

  ServerConfig d;
  CHECK(error_of([&] { apply_env(d, {{"POLYDAWG_PORT", "eighty"}}); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([&] { apply_env(d, {{"POLYDAWG_PORT", "70000"}}); }) == ErrorCode::InvalidArgument);
  ServerConfig e;
  e.log_level = "loud";
  CHECK(error_of([&] { validate(e); }) == ErrorCode::InvalidArgument);
}

}  // TEST_SUITE
