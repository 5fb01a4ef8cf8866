#include "polydawg/planner/planner.hpp"

#include <spdlog/spdlog.h>

#include "polydawg/bql/parser.hpp"
#include "polydawg/error.hpp"

namespace polydawg {

Planner::Planner(const catalog::Catalog& catalog, Executor& executor, monitor::Monitor& monitor)
    : catalog_(catalog), executor_(executor), monitor_(monitor) {}

std::string Planner::next_query_id() { return "q" + std::to_string(++counter_); }

std::vector<QueryExecutionPlan> Planner::plans_for(const std::string& user_input) {
  const bql::Ast ast = bql::parse(user_input);
  if (ast.is_catalog()) throw Error(ErrorCode::PlanningError, "catalog queries have no plans");
  return enumerate_plans(build_plan(std::get<bql::IslandQuery>(ast.node)), catalog_,
                         "#" + next_query_id());
}

double Planner::run_plan(const Signature& signature, std::size_t index) {
  const auto plans = plans_for(signature.text);
  if (index >= plans.size()) {
    throw Error(ErrorCode::InvalidArgument, "plan index " + std::to_string(index) + " out of range");
  }
  return executor_.execute_plan(plans[index]).elapsed_ms;
}

Response Planner::process_query(const std::string& user_input, bool is_training) {
  const std::string qid = next_query_id();
  SpanRecorder spans(qid);
  Response out;

  std::vector<QueryExecutionPlan> plans;
  Signature signature;
  std::optional<std::size_t> chosen;
  {
    SpanRecorder::Scope span(&spans, task::kOptimization);
    const bql::Ast ast = bql::parse(user_input);
    if (ast.is_catalog()) {
      out.result.data = catalog_.query(std::get<bql::CatalogQuery>(ast.node));
    } else {
      const auto& query = std::get<bql::IslandQuery>(ast.node);
      plans = enumerate_plans(build_plan(query), catalog_, "#" + qid);
      signature = make_signature(query);
      if (plans.size() == 1) {
        chosen = 0;
      } else if (!is_training) {
        if (auto match = monitor_.get_closest_signature(signature)) {
          const auto timings = monitor_.get_benchmark_performance(match->signature);
          if (timings.size() == plans.size()) chosen = argmin_plan(timings);
        }
        if (!chosen) out.warnings.push_back("no usable benchmark history; measured every plan");
      }
      if (!monitor_.contains(signature)) {
        std::vector<std::string> ids;
        for (const auto& p : plans) ids.push_back(p.id);
        try {
          monitor_.add_benchmark(signature, true, ids);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DuplicateBenchmark) throw;
        }
      }
    }
  }
  if (plans.empty()) {
    out.spans = spans.spans();
    out.elapsed_ms = spans.now_ms();
    return out;
  }
  out.plan_count = plans.size();

  if (chosen) {
    QueryResult r = executor_.execute_plan_measured(plans[*chosen], signature, *chosen, &spans);
    out.result = std::move(r.result);
    out.plan_id = plans[*chosen].id;
  } else {
    std::optional<QueryResult> best;
    for (std::size_t i = 0; i < plans.size(); ++i) {
      QueryResult r = executor_.execute_plan_measured(plans[i], signature, i, &spans);
      spdlog::debug("{} plan {} [{}] {:.3f} ms", qid, i, plans[i].id, r.elapsed_ms);
      if (!best || r.elapsed_ms < best->elapsed_ms) {
        best = std::move(r);
        chosen = i;
      }
    }
    out.result = std::move(best->result);
    out.plan_id = plans[*chosen].id;
  }
  out.spans = spans.spans();
  out.elapsed_ms = spans.now_ms();
  return out;
}

}  // namespace polydawg
