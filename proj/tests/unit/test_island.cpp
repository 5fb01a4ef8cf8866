#include <algorithm>
#include <thread>

#include "common.hpp"
#include "demo.hpp"
#include "doctest.h"
#include "polydawg/island/island.hpp"

using namespace polydawg;
using bql::Island;
using testing::error_of;
using testing::island_of;

namespace {

int engine(const Polystore& s, const std::string& name) {
  return s.catalog().engine_by_name(name)->engine_id;
}

/// Every object of every attached engine, for read-only checks.
std::vector<std::pair<std::string, ResultSet>> dump(Polystore& s) {
  std::vector<std::pair<std::string, ResultSet>> out;
  for (int id : s.registry().ids()) {
    auto e = s.registry().get(id);
    for (const auto& name : e->object_names()) {
      out.emplace_back(std::to_string(id) + "/" + name, e->read_object(name));
    }
  }
  return out;
}

bool same_dump(const std::vector<std::pair<std::string, ResultSet>>& a,
               const std::vector<std::pair<std::string, ResultSet>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || !same_result(a[i].second, b[i].second, true)) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("island") {

TEST_CASE("operation sets cover the frontend operators") {
  const auto& arr = island::operations(Island::Array);
  for (const char* op : {"scan", "project", "filter", "aggregate", "apply", "cross_join",
                         "redimension", "sort"}) {
    CHECK(std::find(arr.begin(), arr.end(), op) != arr.end());
  }
  const auto& text = island::operations(Island::Text);
  CHECK(std::find(text.begin(), text.end(), "scan") != text.end());
  CHECK_FALSE(island::operations(Island::Relational).empty());
}

TEST_CASE("attach_engines creates one engine per shimmed catalog engine") {
  auto s = testing::demo_store();
  const auto ids = s->registry().ids();
  CHECK(ids.size() == 3);
  CHECK_FALSE(s->registry().contains(engine(*s, "postgres0")));
  for (int id : ids) CHECK(s->registry().get(id)->island() == *s->catalog().island_of(id));
  CHECK(error_of([&] { s->registry().get(99); }) == ErrorCode::UnknownEngine);
}

TEST_CASE("candidate engines for single placements and unknown objects") {
  auto s = testing::demo_store();
  const auto& c = s->catalog();
  CHECK(island::candidate_engines(island_of(testing::kLimit4), c) ==
        std::vector<int>{engine(*s, "postgres1")});
  CHECK(island::candidate_engines(island_of(testing::kArrayFilter), c) ==
        std::vector<int>{engine(*s, "scidb")});
  CHECK(error_of([&] {
          island::candidate_engines(island_of("bdrel(select * from nowhere)"), c);
        }) == ErrorCode::UnknownObject);
}

TEST_CASE("candidate engines include engines reachable through casts") {
  auto s = testing::demo_store(1);
  const auto& c = s->catalog();
  const int pg1 = engine(*s, "postgres1");
  const int pg2 = engine(*s, "postgres2");
  CHECK(island::candidate_engines(island_of(testing::kLimit4), c) == std::vector<int>{pg1, pg2});

  // An object held only by the replica can still run on postgres1 through the cast.
  const int db = c.database_by_name("mimic2v26_postgres2")->database_id;
  s->catalog().register_object("only_replica", {"a"}, db, db);
  const auto cands =
      island::candidate_engines(island_of("bdrel(select * from only_replica)"), c);
  CHECK(cands == std::vector<int>{pg1, pg2});
}

TEST_CASE("no candidate engine without a cast path") {
  Polystore s;
  auto& c = s.catalog();
  const int a = c.register_engine("a", "h", 1, "");
  const int b = c.register_engine("b", "h", 2, "");
  const int da = c.register_database(a, "da", "u", "p");
  const int db = c.register_database(b, "db", "u", "p");
  c.register_shim(Island::Relational, a);
  c.register_shim(Island::Relational, b);
  c.register_object("x", {"v"}, da, da);
  c.register_object("y", {"v"}, db, db);
  CHECK(error_of([&] {
          island::candidate_engines(island_of("bdrel(select * from x, y)"), c);
        }) == ErrorCode::NoCandidateEngine);
  c.register_cast(b, a, "csv");
  CHECK(island::candidate_engines(island_of("bdrel(select * from x, y)"), c) ==
        std::vector<int>{a});
}

TEST_CASE("execute_on runs island bodies with provenance") {
  auto s = testing::demo_store();
  const auto& c = s->catalog();
  const auto rel = island::execute_on(c, s->registry(), engine(*s, "postgres1"),
                                      island_of(testing::kLimit4));
  CHECK(rel.table().rows.size() == 4);
  CHECK(rel.engine_id == engine(*s, "postgres1"));
  CHECK(rel.elapsed_ms >= 0);

  const auto arr = island::execute_on(c, s->registry(), engine(*s, "scidb"),
                                      island_of(testing::kArrayFilter));
  const auto full = s->registry().get(engine(*s, "scidb"))->read_object("myarray");
  std::size_t expected = 0;
  for (const auto& [coords, attrs] : full.array().cells) expected += coords[0] > 150;
  CHECK(arr.array().cells.size() == expected);
  CHECK(expected > 0);
  CHECK(expected < full.array().cells.size());
}

TEST_CASE("island mismatches and engine errors are reported distinctly") {
  auto s = testing::demo_store();
  const auto& c = s->catalog();
  CHECK(error_of([&] {
          island::execute_on(c, s->registry(), engine(*s, "postgres1"),
                             island_of(testing::kTextRange));
        }) == ErrorCode::ShimUnsupported);
  CHECK(error_of([&] {
          island::execute_on(c, s->registry(), engine(*s, "postgres0"),
                             island_of(testing::kLimit4));
        }) == ErrorCode::ShimUnsupported);
  try {
    island::execute_on(c, s->registry(), engine(*s, "postgres1"),
                       island_of("bdrel(select nope from mimic2v26.d_patients)"));
    FAIL("expected an engine failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EngineFailure);
    CHECK(e.cause() == ErrorCode::UnknownColumn);
  }
}

TEST_CASE("replicated objects give equal results on both engines") {
  auto s = testing::demo_store(1);
  const auto& c = s->catalog();
  for (const char* q :
       {"bdrel(select * from mimic2v26.d_patients limit 4)",
        "bdrel(select sex, count(*) from mimic2v26.d_patients group by sex)",
        "bdrel(select p.subject_id, o.medication from mimic2v26.d_patients p, mimic2v26.poe_order o "
        "where p.subject_id = o.subject_id and o.dose_val > 90 order by o.poe_id)",
        "bdrel(select distinct route from mimic2v26.poe_order order by route)"}) {
    const auto a = island::execute_on(c, s->registry(), engine(*s, "postgres1"), island_of(q));
    const auto b = island::execute_on(c, s->registry(), engine(*s, "postgres2"), island_of(q));
    CHECK(same_result(a, b));
    CHECK(a.engine_id != b.engine_id);
  }
}

TEST_CASE("retrieval leaves engine state unchanged") {
  auto s = testing::demo_store();
  const auto before = dump(*s);
  const auto& c = s->catalog();
  island::execute_on(c, s->registry(), engine(*s, "postgres1"), island_of(testing::kLimit4));
  island::execute_on(c, s->registry(), engine(*s, "scidb"), island_of(testing::kArrayFilter));
  island::execute_on(c, s->registry(), engine(*s, "accumulo"), island_of(testing::kTextRange));
  CHECK(same_dump(before, dump(*s)));
}

TEST_CASE("concurrent execute_on calls agree") {
  auto s = testing::demo_store();
  const auto& c = s->catalog();
  const auto expected =
      island::execute_on(c, s->registry(), engine(*s, "scidb"), island_of(testing::kArrayFilter));
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 10; ++i) {
        auto r = island::execute_on(c, s->registry(), engine(*s, "scidb"),
                                    island_of(testing::kArrayFilter));
        if (!same_result(r, expected)) ++mismatches;
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(mismatches == 0);
}

}  // TEST_SUITE
