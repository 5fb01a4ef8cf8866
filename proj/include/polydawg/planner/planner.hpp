#pragma once

#include <atomic>
#include <string>
#include <vector>

#include "polydawg/catalog/catalog.hpp"
#include "polydawg/executor/executor.hpp"
#include "polydawg/monitor/monitor.hpp"
#include "polydawg/planner/plan.hpp"
#include "polydawg/planner/signature.hpp"

namespace polydawg {

struct Response {
  ResultSet result;
  std::string plan_id;  // empty for catalog queries
  std::size_t plan_count = 0;
  std::vector<TaskSpan> spans;
  std::vector<std::string> warnings;
  double elapsed_ms = 0;
};

/// Query entry point: routes catalog queries, plans retrieval queries, picks a
/// plan from measurements or monitor history, and runs it.
class Planner {
 public:
  Planner(const catalog::Catalog& catalog, Executor& executor, monitor::Monitor& monitor);

  Response process_query(const std::string& user_input, bool is_training);

  /// Plans of a retrieval query, as enumerated for execution.
  std::vector<QueryExecutionPlan> plans_for(const std::string& user_input);

  /// Runs plan `index` of the query behind `signature` without measuring it;
  /// returns its duration in ms. Installed as the monitor's plan runner.
  double run_plan(const Signature& signature, std::size_t index);

 private:
  std::string next_query_id();

  const catalog::Catalog& catalog_;
  Executor& executor_;
  monitor::Monitor& monitor_;
  std::atomic<std::uint64_t> counter_{0};
};

}  // namespace polydawg
