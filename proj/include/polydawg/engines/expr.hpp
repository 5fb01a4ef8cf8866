#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/value.hpp"

namespace polydawg::engines {

/// One addressable column of an evaluation row.
struct ScopeColumn {
  std::vector<std::string> qualifiers;  // names that may prefix the column
  std::string name;
  ScalarType type = ScalarType::String;
};

using Scope = std::vector<ScopeColumn>;

/// Expression with column references resolved to row positions and types
/// inferred. Aggregate calls become slots filled by the caller.
struct BoundExpr {
  enum class Op {
    Literal, Column, Aggregate,
    Neg, Not, IsNull, IsNotNull,
    Add, Sub, Mul, Div,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or,
  };

  Op op = Op::Literal;
  Value literal;
  std::size_t index = 0;  // Column: row position; Aggregate: slot
  std::vector<BoundExpr> args;
  std::optional<ScalarType> type;  // nullopt for an untyped NULL literal
};

/// Receives aggregate calls met during binding; returns the slot index and
/// result type for the call.
using AggregateSlotter =
    std::function<std::pair<std::size_t, ScalarType>(const bql::Expr& call)>;

/// Resolves `expr` against `scope`. Throws UnknownColumn for unresolved or
/// ambiguous references, TypeError for ill-typed operators, and
/// InvalidGrouping when an aggregate appears and `slotter` is empty.
BoundExpr bind_expr(const bql::Expr& expr, const Scope& scope, const AggregateSlotter& slotter = {});

/// Index of the column `expr` (a Column expression) resolves to.
std::size_t resolve_column(const bql::Expr& column, const Scope& scope);

/// Evaluates with SQL three-valued logic; null propagates through
/// arithmetic and comparisons. Throws DivisionByZero and TypeError (integer
/// overflow).
Value evaluate(const BoundExpr& expr, std::span<const Value> row,
               std::span<const Value> aggregates = {});

/// Result type of an aggregate function over an argument type.
ScalarType aggregate_type(const std::string& function, std::optional<ScalarType> arg);

/// Running state of one aggregate call. Nulls are skipped.
class Accumulator {
 public:
  Accumulator(std::string function, ScalarType result_type);
  void add(const Value& v);  // count(*) passes a non-null marker
  Value result() const;

 private:
  std::string function_;
  ScalarType result_type_;
  std::int64_t count_ = 0;
  std::int64_t int_sum_ = 0;
  double double_sum_ = 0;
  Value best_;
};

/// Collects top-level AND conjuncts.
void split_conjuncts(const bql::Expr& expr, std::vector<const bql::Expr*>& out);

/// Row positions referenced by a bound expression.
void referenced_columns(const BoundExpr& expr, std::vector<std::size_t>& out);

}  // namespace polydawg::engines
