#include <set>

#include "common.hpp"
#include "demo.hpp"
#include "doctest.h"
#include "polydawg/planner/plan.hpp"
#include "polydawg/planner/planner.hpp"

using namespace polydawg;
using bql::Island;
using testing::error_of;
using testing::island_of;

namespace {

const char* kTwoCasts =
    "bdarray(cross_join("
    "bdcast(bdrel(select subject_id, sex from mimic2v26.d_patients where subject_id < 4), a, "
    "'<sex:string>[subject_id=0:*]', array), "
    "bdcast(bdrel(select poe_id, dose_val from mimic2v26.poe_order where poe_id < 1004), b, "
    "'<dose_val:double>[poe_id=0:*]', array)))";

const char* kThreeCasts =
    "bdarray(cross_join(cross_join("
    "bdcast(bdrel(select subject_id, sex from mimic2v26.d_patients where subject_id < 3), a, "
    "'<sex:string>[subject_id=0:*]', array), "
    "bdcast(bdrel(select poe_id, dose_val from mimic2v26.poe_order where poe_id < 1003), b, "
    "'<dose_val:double>[poe_id=0:*]', array)), "
    "bdcast(bdrel(select poe_id as pid, route from mimic2v26.poe_order where poe_id > 1198), c, "
    "'<route:string>[pid=0:*]', array)))";

std::size_t total_calls(Polystore& s) {
  std::size_t n = 0;
  for (int id : s.registry().ids()) n += s.registry().get(id)->call_count();
  return n;
}

std::size_t count_casts(const bql::IslandQuery& q) {
  std::size_t n = 0;
  for (const auto* c : bql::direct_casts(q)) n += 1 + count_casts(*c->inner);
  return n;
}

}  // namespace

TEST_SUITE("planner") {

TEST_CASE("build_plan shapes") {
  const auto single = build_plan(island_of(testing::kLimit4));
  CHECK(single.nodes.size() == 1);
  CHECK(single.schedule == std::vector<int>{single.root});

  const auto chain = build_plan(island_of(testing::kCastChain));
  REQUIRE(chain.nodes.size() == 3);
  const auto& root = chain.nodes[chain.root];
  CHECK(root.kind == PlanNode::Kind::Query);
  CHECK(root.body.island() == Island::Array);
  REQUIRE(root.inputs.size() == 1);
  const auto& mig = chain.nodes[root.inputs[0]];
  CHECK(mig.kind == PlanNode::Kind::Migration);
  CHECK(mig.intermediate == "poe_order_copy");
  CHECK(mig.dest_island == Island::Array);
  CHECK(chain.nodes[mig.child].body.island() == Island::Relational);

  const auto two = build_plan(island_of(kTwoCasts));
  CHECK(two.nodes[two.root].inputs.size() == 2);
  CHECK(two.nodes.size() == 5);
}

TEST_CASE("node count equals island bodies plus casts, schedule is topological") {
  for (const char* q : {testing::kLimit4, testing::kCastChain, kTwoCasts, kThreeCasts}) {
    const auto ast = island_of(q);
    const auto plan = build_plan(ast);
    const std::size_t casts = count_casts(ast);
    CHECK(plan.nodes.size() == 2 * casts + 1);
    std::vector<int> position(plan.nodes.size(), -1);
    for (std::size_t i = 0; i < plan.schedule.size(); ++i) position[plan.schedule[i]] = static_cast<int>(i);
    for (std::size_t n = 0; n < plan.nodes.size(); ++n) {
      const auto& node = plan.nodes[n];
      if (node.kind == PlanNode::Kind::Migration) {
        CHECK(position[node.child] < position[n]);
      }
      for (int in : node.inputs) CHECK(position[in] < position[n]);
    }
    CHECK(plan.schedule.back() == plan.root);
  }
}

TEST_CASE("misplaced casts and duplicate intermediates are rejected") {
  auto q = island_of(testing::kCastChain);
  auto* cast = const_cast<bql::CastLeaf*>(bql::direct_casts(q)[0]);
  cast->dest_island = Island::Text;
  CHECK(error_of([&] { build_plan(q); }) == ErrorCode::MisplacedCast);

  const auto dup = island_of(
      "bdarray(cross_join("
      "bdcast(bdrel(select subject_id, sex from mimic2v26.d_patients), a, '<sex:string>[subject_id=0:*]', array), "
      "bdcast(bdrel(select subject_id, sex from mimic2v26.d_patients), a, '<sex:string>[subject_id=0:*]', array)))");
  CHECK(error_of([&] { build_plan(dup); }) == ErrorCode::PlanningError);
}

TEST_CASE("enumeration counts follow placements and orderings") {
  auto s = testing::demo_store();
  const auto& c = s->catalog();
  CHECK(enumerate_plans(build_plan(island_of(testing::kCastChain)), c, "#t").size() == 1);
  const auto two = enumerate_plans(build_plan(island_of(kTwoCasts)), c, "#t");
  CHECK(two.size() == 2);
  CHECK(two[0].id != two[1].id);

  auto r = testing::demo_store(1);
  const auto replicated = enumerate_plans(build_plan(island_of(testing::kLimit4)), r->catalog(), "#t");
  CHECK(replicated.size() == 2);
  const auto chain = enumerate_plans(build_plan(island_of(testing::kCastChain)), r->catalog(), "#t");
  CHECK(chain.size() == 2);
}

TEST_CASE("enumeration is capped, deterministic and varies placement fastest") {
  auto s = testing::demo_store(2);  // three relational engines
  const auto plan = build_plan(island_of(kThreeCasts));
  const auto a = enumerate_plans(plan, s->catalog(), "#t");
  const auto b = enumerate_plans(plan, s->catalog(), "#t");
  CHECK(a.size() == kMaxPlans);
  REQUIRE(a.size() == b.size());
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    ids.insert(a[i].id);
  }
  CHECK(ids.size() == a.size());
  // 27 placements per ordering: the first 27 plans share the first ordering.
  auto ordering_of = [](const std::string& id) { return id.substr(id.find('<')); };
  for (std::size_t i = 1; i < 27; ++i) CHECK(ordering_of(a[i].id) == ordering_of(a[0].id));
  CHECK(ordering_of(a[27].id) != ordering_of(a[0].id));
  CHECK(a[0].steps[a[0].steps.size() - 1].kind == QepStep::Kind::Query);
}

TEST_CASE("every enumerated plan yields the same result") {
  auto s = testing::demo_store(1);
  for (const char* q : {testing::kLimit4, testing::kCastChain, kTwoCasts,
                        "bdrel(select sex, count(*) from mimic2v26.d_patients group by sex)"}) {
    const auto plans = s->planner().plans_for(q);
    REQUIRE(plans.size() >= 2);
    const auto first = s->executor().execute_plan(plans[0]).result;
    for (std::size_t i = 1; i < plans.size(); ++i) {
      CHECK(same_result(first, s->executor().execute_plan(plans[i]).result));
    }
  }
}

TEST_CASE("argmin selection and tie-break") {
  CHECK(argmin_plan({120.0, 80.0}) == 1u);
  CHECK(argmin_plan({50.0, 50.0}) == 0u);
  CHECK(argmin_plan({7.0}) == 0u);
  CHECK(argmin_plan({3.0, std::nullopt}) == std::nullopt);
  CHECK(argmin_plan({}) == std::nullopt);
}

TEST_CASE("catalog queries never touch an engine") {
  auto s = testing::demo_store();
  const auto before = total_calls(*s);
  const auto r = s->query(testing::kCatalogObjects);
  CHECK(total_calls(*s) == before);
  CHECK(r.result.table().rows.size() == 4);
  CHECK(r.plan_id.empty());
  REQUIRE(r.spans.size() == 1);
  CHECK(r.spans[0].task == task::kOptimization);
}

TEST_CASE("the cast chain runs with an empty monitor") {
  auto s = testing::demo_store();
  const auto r = s->query(testing::kCastChain, false);
  CHECK(r.result.island() == Island::Array);
  CHECK(r.result.cardinality() == 5);
  CHECK(r.plan_count == 1);
  CHECK(s->monitor().sample_count(make_signature(std::string(testing::kCastChain)), 0) == 1);
}

TEST_CASE("parse errors surface with their offsets") {
  auto s = testing::demo_store();
  try {
    s->query("bdrel(");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(e.offset().has_value());
  }
  CHECK(error_of([&] { s->query("bdfoo(x)"); }) == ErrorCode::UnknownFunctionToken);
}

TEST_CASE("training measures every plan and later runs follow the fastest") {
  auto s = testing::demo_store(1);
  const std::string q = testing::kLimit4;
  const auto sig = make_signature(q);
  const auto trained = s->query(q, true);
  CHECK(trained.plan_count == 2);
  CHECK(s->monitor().sample_count(sig, 0) == 1);
  CHECK(s->monitor().sample_count(sig, 1) == 1);
  CHECK(trained.result.table().rows.size() == 4);

  const auto timings = s->monitor().get_benchmark_performance(sig);
  const auto best = *argmin_plan(timings);
  const auto plans = s->planner().plans_for(q);
  const auto chosen = s->query(q, false);
  CHECK(chosen.plan_id == plans[best].id);
  CHECK(chosen.warnings.empty());
}

TEST_CASE("a literal-perturbed query reuses the trained history") {
  auto s = testing::demo_store(1);
  const std::string q4 = testing::kLimit4;
  const std::string q9 = "bdrel(select * from mimic2v26.d_patients limit 9)";
  s->query(q4, true);
  const auto best = *argmin_plan(s->monitor().get_benchmark_performance(make_signature(q4)));
  const auto r = s->query(q9, false);
  CHECK(r.warnings.empty());
  CHECK(r.plan_id == s->planner().plans_for(q9)[best].id);
  CHECK(r.result.table().rows.size() == 9);
  CHECK(s->monitor().contains(make_signature(q9)));
}

TEST_CASE("a missing history falls back to measuring with a warning") {
  auto s = testing::demo_store(1);
  const auto r = s->query(testing::kLimit4, false);
  CHECK(r.warnings.size() == 1);
  const auto sig = make_signature(std::string(testing::kLimit4));
  CHECK(s->monitor().sample_count(sig, 0) == 1);
  CHECK(s->monitor().sample_count(sig, 1) == 1);
}

TEST_CASE("the monitor runner re-runs a plan by signature") {
  auto s = testing::demo_store(1);
  const auto sig = make_signature(std::string(testing::kCastChain));
  CHECK(s->planner().run_plan(sig, 1) >= 0);
  CHECK(error_of([&] { s->planner().run_plan(sig, 5); }) == ErrorCode::InvalidArgument);
  s->monitor().add_benchmark(sig, false, {"a", "b"});
  CHECK(s->monitor().sample_count(sig, 0) == 1);
  CHECK(s->monitor().sample_count(sig, 1) == 1);
  for (int id : s->registry().ids()) {
    for (const auto& name : s->registry().get(id)->object_names()) {
      CHECK(name.find('#') == std::string::npos);
    }
  }
}

}  // TEST_SUITE
