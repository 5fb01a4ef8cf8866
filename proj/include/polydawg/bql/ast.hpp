#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "polydawg/value.hpp"

namespace polydawg::bql {

enum class Island { Relational, Array, Text };

std::string_view to_string(Island island);
std::optional<Island> parse_island(std::string_view name);

/// Owning pointer with value semantics, used to break recursion in the AST.
template <typename T>
class Box {
 public:
  Box() : ptr_(std::make_unique<T>()) {}
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

/// Scalar expression shared by the relational and array islands.
struct Expr {
  enum class Kind { Literal, Column, Star, Unary, Binary, Call, IsNull };

  Kind kind = Kind::Literal;
  Value literal;
  std::string qualifier;  // Column: table alias or schema-qualified table name
  std::string name;       // Column name, operator symbol or function name
  bool negated = false;   // IsNull: IS NOT NULL
  std::vector<Expr> args;

  static Expr make_literal(Value v);
  static Expr make_column(std::string qualifier, std::string name);
  static Expr make_star();
  static Expr make_unary(std::string op, Expr operand);
  static Expr make_binary(std::string op, Expr lhs, Expr rhs);
  static Expr make_call(std::string function, std::vector<Expr> args);
  static Expr make_is_null(Expr operand, bool negated);

  bool operator==(const Expr&) const = default;
};

bool is_aggregate_function(std::string_view name);
bool contains_aggregate(const Expr& e);

struct AttributeDesc {
  std::string name;
  ScalarType type = ScalarType::Int64;
  bool operator==(const AttributeDesc&) const = default;
};

struct DimensionDesc {
  std::string name;
  std::int64_t low = 0;
  std::optional<std::int64_t> high;  // nullopt: unbounded ('*')
  std::int64_t chunk = 1000000;
  std::int64_t overlap = 0;
  bool operator==(const DimensionDesc&) const = default;

  bool contains(std::int64_t coordinate) const {
    return coordinate >= low && (!high || coordinate <= *high);
  }
};

struct ArraySchema {
  std::vector<AttributeDesc> attributes;
  std::vector<DimensionDesc> dimensions;
  bool operator==(const ArraySchema&) const = default;

  std::optional<std::size_t> attribute_index(std::string_view name) const;
  std::optional<std::size_t> dimension_index(std::string_view name) const;
};

struct ColumnDesc {
  std::string name;
  ScalarType type = ScalarType::String;
  bool operator==(const ColumnDesc&) const = default;
};

/// `(col type, ...)` destination schema for casts into the relational island.
struct RelationalSchema {
  std::vector<ColumnDesc> columns;
  bool operator==(const RelationalSchema&) const = default;
};

/// Destination schema for casts into the text island: the source column that
/// becomes the row key.
struct TextSchema {
  std::string key_column;
  bool operator==(const TextSchema&) const = default;
};

using DestSchema = std::variant<RelationalSchema, ArraySchema, TextSchema>;

struct IslandQuery;

struct CastLeaf {
  Box<IslandQuery> inner;
  std::string intermediate_name;
  DestSchema dest_schema;
  Island dest_island = Island::Relational;
  bool operator==(const CastLeaf&) const = default;
};

using ObjectSource = std::variant<std::string, CastLeaf>;

// ---- relational island -------------------------------------------------

struct SelectItem {
  Expr expr;
  std::optional<std::string> alias;
  bool operator==(const SelectItem&) const = default;
};

struct FromItem {
  ObjectSource source;
  std::optional<std::string> alias;
  bool operator==(const FromItem&) const = default;

  /// Name the item is addressed by: alias, table name or intermediate name.
  std::string binding_name() const;
  /// Name of the object read: table name or cast intermediate name.
  const std::string& object_name() const;
};

struct OrderItem {
  Expr expr;
  bool descending = false;
  bool operator==(const OrderItem&) const = default;
};

struct RelationalSelect {
  bool distinct = false;
  bool star = false;
  std::vector<SelectItem> projections;
  std::vector<FromItem> from;
  std::optional<Expr> where;
  std::vector<Expr> group_by;  // column references only
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;
  bool operator==(const RelationalSelect&) const = default;

  bool is_grouped() const;
};

// ---- array island ------------------------------------------------------

struct ArrayExpr;

struct ArrayRef {
  ObjectSource source;
  bool operator==(const ArrayRef&) const = default;
};

struct ArrayScan {
  Box<ArrayExpr> input;
  bool operator==(const ArrayScan&) const = default;
};

struct ArrayProject {
  Box<ArrayExpr> input;
  std::vector<std::string> attributes;
  bool operator==(const ArrayProject&) const = default;
};

struct ArrayFilter {
  Box<ArrayExpr> input;
  Expr predicate;
  bool operator==(const ArrayFilter&) const = default;
};

struct AggregateCall {
  std::string function;                 // count, sum, avg, min, max
  std::optional<std::string> attribute;  // nullopt: count(*)
  std::optional<std::string> alias;
  bool operator==(const AggregateCall&) const = default;

  std::string output_name() const;
};

struct ArrayAggregate {
  Box<ArrayExpr> input;
  std::vector<AggregateCall> calls;
  std::vector<std::string> group_dims;
  bool operator==(const ArrayAggregate&) const = default;
};

struct ArrayApply {
  Box<ArrayExpr> input;
  std::vector<std::pair<std::string, Expr>> columns;
  bool operator==(const ArrayApply&) const = default;
};

struct DimRef {
  std::string qualifier;
  std::string name;
  bool operator==(const DimRef&) const = default;
};

struct ArrayCrossJoin {
  Box<ArrayExpr> left;
  std::optional<std::string> left_alias;
  Box<ArrayExpr> right;
  std::optional<std::string> right_alias;
  std::vector<std::pair<DimRef, DimRef>> pairs;
  bool operator==(const ArrayCrossJoin&) const = default;
};

struct ArrayRedimension {
  Box<ArrayExpr> input;
  std::variant<std::string, ArraySchema> target;
  bool operator==(const ArrayRedimension&) const = default;
};

struct ArraySort {
  Box<ArrayExpr> input;
  std::vector<std::string> attributes;
  bool operator==(const ArraySort&) const = default;
};

struct ArrayExpr {
  std::variant<ArrayRef, ArrayScan, ArrayProject, ArrayFilter, ArrayAggregate, ArrayApply,
               ArrayCrossJoin, ArrayRedimension, ArraySort>
      node;
  bool operator==(const ArrayExpr&) const = default;
};

// ---- text island -------------------------------------------------------

enum class TextOp { Scan, Range };

std::string_view to_string(TextOp op);

struct TextBound {
  std::string row;
  std::string colfam;
  std::string colqual;
  bool operator==(const TextBound&) const = default;
};

struct TextRange {
  std::optional<TextBound> start;
  std::optional<TextBound> end;
  bool operator==(const TextRange&) const = default;
};

struct TextQuery {
  TextOp op = TextOp::Scan;
  ObjectSource table;
  std::optional<TextRange> range;
  bool operator==(const TextQuery&) const = default;
};

// ---- top level ---------------------------------------------------------

struct IslandQuery {
  std::variant<RelationalSelect, ArrayExpr, TextQuery> body;
  bool operator==(const IslandQuery&) const = default;

  Island island() const { return static_cast<Island>(body.index()); }
};

struct CatalogFilter {
  std::string column;
  Value value;
  bool operator==(const CatalogFilter&) const = default;
};

struct CatalogQuery {
  std::string table;
  std::vector<std::string> columns;  // empty: all columns
  std::optional<CatalogFilter> filter;
  bool operator==(const CatalogQuery&) const = default;
};

struct Ast {
  std::variant<CatalogQuery, IslandQuery> node;
  bool operator==(const Ast&) const = default;

  bool is_catalog() const { return node.index() == 0; }
};

/// Casts that appear directly inside `query` (not inside nested casts), in
/// source order.
std::vector<const CastLeaf*> direct_casts(const IslandQuery& query);

/// Catalog object names referenced directly by `query`, excluding cast
/// intermediates, in first-appearance order.
std::vector<std::string> referenced_objects(const IslandQuery& query);

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace polydawg::bql
