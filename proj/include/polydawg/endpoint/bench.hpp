#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polydawg/polystore.hpp"

namespace polydawg::endpoint {

struct BenchQuery {
  std::string name;
  std::string text;
};

struct Distribution {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

/// Linear-interpolation quantiles of `samples`; requires a non-empty input.
Distribution summarize(std::vector<double> samples);

struct TaskShare {
  std::string task;
  double ms = 0;
  double fraction = 0;  // of the representative run's total
};

struct QueryReport {
  std::string name;
  std::string text;
  std::size_t runs = 0;
  std::vector<double> totals_ms;
  Distribution stats;
  std::vector<TaskSpan> waterfall;  // spans of the median run
  double waterfall_total_ms = 0;
  std::vector<TaskShare> tasks;     // per-task sums over the waterfall, first-seen order
  double execution_fraction = 0;    // engine queries + migrator dispatch + migration
  double optimization_fraction = 0;
  std::string error;                // set when the query failed; runs stop there
};

struct BenchReport {
  std::vector<QueryReport> queries;
};

/// Reads `name<TAB>query` or bare `query` lines; blank and `#` lines are skipped.
std::vector<BenchQuery> read_queries(std::istream& in);

/// Runs every query `runs` times. Failures are recorded per query.
BenchReport run_bench(Polystore& store, const std::vector<BenchQuery>& queries, std::size_t runs);

/// `query,task,start_ms,end_ms,duration_ms,fraction`, one line per span.
std::string waterfall_csv(const BenchReport& report);
/// `query,runs,min_ms,q1_ms,median_ms,q3_ms,max_ms`, one line per query.
std::string distribution_csv(const BenchReport& report);
/// Human-readable summary including the execution and optimization fractions.
std::string format_report(const BenchReport& report);

/// Standard demo workload: pairs of migration-bearing queries and their
/// single-island counterparts.
std::vector<BenchQuery> demo_queries();

}  // namespace polydawg::endpoint
