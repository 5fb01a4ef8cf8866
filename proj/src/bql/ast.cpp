#include "polydawg/bql/ast.hpp"

#include <algorithm>

#include "polydawg/text_util.hpp"

namespace polydawg::bql {

std::string_view to_string(Island island) {
  switch (island) {
    case Island::Relational: return "relational";
    case Island::Array: return "array";
    case Island::Text: return "text";
  }
  return "?";
}

std::optional<Island> parse_island(std::string_view name) {
  const std::string n = to_lower(name);
  if (n == "relational") return Island::Relational;
  if (n == "array") return Island::Array;
  if (n == "text") return Island::Text;
  return std::nullopt;
}

std::string_view to_string(TextOp op) { return op == TextOp::Scan ? "scan" : "range"; }

Expr Expr::make_literal(Value v) {
  Expr e;
  e.kind = Kind::Literal;
  e.literal = std::move(v);
  return e;
}

Expr Expr::make_column(std::string qualifier, std::string name) {
  Expr e;
  e.kind = Kind::Column;
  e.qualifier = std::move(qualifier);
  e.name = std::move(name);
  return e;
}

Expr Expr::make_star() {
  Expr e;
  e.kind = Kind::Star;
  return e;
}

Expr Expr::make_unary(std::string op, Expr operand) {
  Expr e;
  e.kind = Kind::Unary;
  e.name = std::move(op);
  e.args.push_back(std::move(operand));
  return e;
}

Expr Expr::make_binary(std::string op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::Binary;
  e.name = std::move(op);
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::make_call(std::string function, std::vector<Expr> args) {
  Expr e;
  e.kind = Kind::Call;
  e.name = std::move(function);
  e.args = std::move(args);
  return e;
}

Expr Expr::make_is_null(Expr operand, bool negated) {
  Expr e;
  e.kind = Kind::IsNull;
  e.negated = negated;
  e.args.push_back(std::move(operand));
  return e;
}

bool is_aggregate_function(std::string_view name) {
  return name == "count" || name == "sum" || name == "avg" || name == "min" || name == "max";
}

bool contains_aggregate(const Expr& e) {
  if (e.kind == Expr::Kind::Call) return true;
  return std::any_of(e.args.begin(), e.args.end(),
                     [](const Expr& a) { return contains_aggregate(a); });
}

std::optional<std::size_t> ArraySchema::attribute_index(std::string_view name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ArraySchema::dimension_index(std::string_view name) const {
  for (std::size_t i = 0; i < dimensions.size(); ++i) {
    if (dimensions[i].name == name) return i;
  }
  return std::nullopt;
}

const std::string& FromItem::object_name() const {
  if (const auto* name = std::get_if<std::string>(&source)) return *name;
  return std::get<CastLeaf>(source).intermediate_name;
}

std::string FromItem::binding_name() const { return alias ? *alias : object_name(); }

bool RelationalSelect::is_grouped() const {
  if (!group_by.empty()) return true;
  return std::any_of(projections.begin(), projections.end(),
                     [](const SelectItem& item) { return contains_aggregate(item.expr); }) ||
         std::any_of(order_by.begin(), order_by.end(),
                     [](const OrderItem& item) { return contains_aggregate(item.expr); });
}

std::string AggregateCall::output_name() const {
  if (alias) return *alias;
  if (!attribute) return function;
  return *attribute + "_" + function;
}

namespace {

void collect_array(const ArrayExpr& expr, std::vector<const CastLeaf*>* casts,
                   std::vector<std::string>* objects);

void collect_source(const ObjectSource& source, std::vector<const CastLeaf*>* casts,
                    std::vector<std::string>* objects) {
  if (const auto* cast = std::get_if<CastLeaf>(&source)) {
    if (casts) casts->push_back(cast);
  } else if (objects) {
    const auto& name = std::get<std::string>(source);
    if (std::find(objects->begin(), objects->end(), name) == objects->end()) {
      objects->push_back(name);
    }
  }
}

void collect_array(const ArrayExpr& expr, std::vector<const CastLeaf*>* casts,
                   std::vector<std::string>* objects) {
  std::visit(Overloaded{
                 [&](const ArrayRef& n) { collect_source(n.source, casts, objects); },
                 [&](const ArrayScan& n) { collect_array(*n.input, casts, objects); },
                 [&](const ArrayProject& n) { collect_array(*n.input, casts, objects); },
                 [&](const ArrayFilter& n) { collect_array(*n.input, casts, objects); },
                 [&](const ArrayAggregate& n) { collect_array(*n.input, casts, objects); },
                 [&](const ArrayApply& n) { collect_array(*n.input, casts, objects); },
                 [&](const ArrayCrossJoin& n) {
                   collect_array(*n.left, casts, objects);
                   collect_array(*n.right, casts, objects);
                 },
                 [&](const ArrayRedimension& n) {
                   collect_array(*n.input, casts, objects);
                   if (const auto* name = std::get_if<std::string>(&n.target)) {
                     collect_source(*name, nullptr, objects);
                   }
                 },
                 [&](const ArraySort& n) { collect_array(*n.input, casts, objects); },
             },
             expr.node);
}

void collect(const IslandQuery& query, std::vector<const CastLeaf*>* casts,
             std::vector<std::string>* objects) {
  std::visit(Overloaded{
                 [&](const RelationalSelect& s) {
                   for (const auto& item : s.from) collect_source(item.source, casts, objects);
                 },
                 [&](const ArrayExpr& a) { collect_array(a, casts, objects); },
                 [&](const TextQuery& t) { collect_source(t.table, casts, objects); },
             },
             query.body);
}

}  // namespace

std::vector<const CastLeaf*> direct_casts(const IslandQuery& query) {
  std::vector<const CastLeaf*> out;
  collect(query, &out, nullptr);
  return out;
}

std::vector<std::string> referenced_objects(const IslandQuery& query) {
  std::vector<std::string> out;
  collect(query, nullptr, &out);
  return out;
}

}  // namespace polydawg::bql
