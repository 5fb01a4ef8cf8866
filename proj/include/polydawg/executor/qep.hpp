#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/engines/engine.hpp"

namespace polydawg {

/// One unit of an execution plan bound to an engine.
struct QepStep {
  enum class Kind { Query, Migration };
  Kind kind = Kind::Query;
  int engine_id = 0;  // Query: executing engine; Migration: destination engine
  bql::IslandQuery body;
  engines::Bindings bindings;
  // Migration: source is either a step's result or a stored object.
  std::optional<int> source_step;
  std::string source_object;
  int source_engine = 0;
  bql::Island source_kind = bql::Island::Relational;
  bql::Island dest_kind = bql::Island::Relational;
  std::string dest_object;
  std::optional<bql::DestSchema> schema;
  std::vector<int> deps;
};

struct QueryExecutionPlan {
  std::string id;
  std::vector<QepStep> steps;
  int root = 0;
  /// Dispatch priority among ready steps.
  std::vector<int> order;
};

}  // namespace polydawg
