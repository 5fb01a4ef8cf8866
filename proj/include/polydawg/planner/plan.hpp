#pragma once

#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/catalog/catalog.hpp"
#include "polydawg/executor/qep.hpp"

namespace polydawg {

/// Node of a cross-island plan: an intra-island query or the migration of a
/// child query's result into a named intermediate.
struct PlanNode {
  enum class Kind { Query, Migration };
  Kind kind = Kind::Query;
  bql::IslandQuery body;      // Query
  std::vector<int> inputs;    // Query: migration nodes feeding its intermediates, source order
  int child = -1;             // Migration: producing query node
  std::string intermediate;   // Migration
  bql::Island dest_island = bql::Island::Relational;
  bql::DestSchema dest_schema;
};

struct CrossIslandQueryPlan {
  std::vector<PlanNode> nodes;
  int root = 0;
  std::vector<int> schedule;  // children before parents
};

CrossIslandQueryPlan build_plan(const bql::IslandQuery& query);

inline constexpr std::size_t kMaxPlans = 32;

/// Concrete plans varying engine placement (fastest) and the order of
/// independent inputs, capped at kMaxPlans. Scratch objects are named with
/// `scratch_suffix` appended.
std::vector<QueryExecutionPlan> enumerate_plans(const CrossIslandQueryPlan& plan,
                                                const catalog::Catalog& catalog,
                                                const std::string& scratch_suffix);

/// Index of the smallest timing; ties and missing samples resolve to the
/// lowest index. Returns nullopt if any timing is missing.
std::optional<std::size_t> argmin_plan(const std::vector<std::optional<double>>& timings);

}  // namespace polydawg
