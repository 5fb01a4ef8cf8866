#include "polydawg/engines/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polydawg/bql/render.hpp"
#include "polydawg/error.hpp"

namespace polydawg::engines {

using bql::Expr;
using Op = BoundExpr::Op;

namespace {

bool numeric_or_null(const std::optional<ScalarType>& t) { return !t || is_numeric(*t); }
bool bool_or_null(const std::optional<ScalarType>& t) { return !t || *t == ScalarType::Bool; }

bool comparable(const std::optional<ScalarType>& a, const std::optional<ScalarType>& b) {
  if (!a || !b) return true;
  if (is_numeric(*a) && is_numeric(*b)) return true;
  return *a == *b;
}

std::optional<ScalarType> arithmetic_type(const std::optional<ScalarType>& a,
                                          const std::optional<ScalarType>& b) {
  auto is_real = [](const std::optional<ScalarType>& t) {
    return t && (*t == ScalarType::Float || *t == ScalarType::Double);
  };
  if (is_real(a) || is_real(b)) return ScalarType::Double;
  return ScalarType::Int64;
}

[[noreturn]] void type_error(const Expr& e, const std::string& why) {
  throw Error(ErrorCode::TypeError, why + " in '" + bql::render(e) + "'");
}

Op binary_op(const std::string& name) {
  if (name == "+") return Op::Add;
  if (name == "-") return Op::Sub;
  if (name == "*") return Op::Mul;
  if (name == "/") return Op::Div;
  if (name == "=") return Op::Eq;
  if (name == "<>") return Op::Ne;
  if (name == "<") return Op::Lt;
  if (name == "<=") return Op::Le;
  if (name == ">") return Op::Gt;
  if (name == ">=") return Op::Ge;
  if (name == "AND") return Op::And;
  if (name == "OR") return Op::Or;
  throw Error(ErrorCode::SyntaxError, "unknown operator '" + name + "'");
}

void check_overflow(bool overflow) {
  if (overflow) throw Error(ErrorCode::TypeError, "integer overflow");
}

Value arithmetic(Op op, const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return Value::null();
  if (a.is_integer() && b.is_integer()) {
    const std::int64_t x = a.as_int64();
    const std::int64_t y = b.as_int64();
    std::int64_t r = 0;
    switch (op) {
      case Op::Add:
        check_overflow(__builtin_add_overflow(x, y, &r));
        return Value(r);
      case Op::Sub:
        check_overflow(__builtin_sub_overflow(x, y, &r));
        return Value(r);
      case Op::Mul:
        check_overflow(__builtin_mul_overflow(x, y, &r));
        return Value(r);
      default:
        if (y == 0) throw Error(ErrorCode::DivisionByZero, "division by zero");
        if (x == std::numeric_limits<std::int64_t>::min() && y == -1) {
          throw Error(ErrorCode::TypeError, "integer overflow");
        }
        return Value(x / y);
    }
  }
  const double x = a.as_double();
  const double y = b.as_double();
  switch (op) {
    case Op::Add: return Value(x + y);
    case Op::Sub: return Value(x - y);
    case Op::Mul: return Value(x * y);
    default:
      if (y == 0.0) throw Error(ErrorCode::DivisionByZero, "division by zero");
      return Value(x / y);
  }
}

Value comparison(Op op, const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return Value::null();
  const auto c = order_values(a, b);
  switch (op) {
    case Op::Eq: return Value(c == 0);
    case Op::Ne: return Value(c != 0);
    case Op::Lt: return Value(c < 0);
    case Op::Le: return Value(c <= 0);
    case Op::Gt: return Value(c > 0);
    default: return Value(c >= 0);
  }
}

}  // namespace

std::size_t resolve_column(const Expr& column, const Scope& scope) {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < scope.size(); ++i) {
    const ScopeColumn& c = scope[i];
    if (c.name != column.name) continue;
    if (!column.qualifier.empty() &&
        std::find(c.qualifiers.begin(), c.qualifiers.end(), column.qualifier) ==
            c.qualifiers.end()) {
      continue;
    }
    if (found) {
      throw Error(ErrorCode::UnknownColumn, "column reference '" + bql::render(column) +
                                                "' is ambiguous");
    }
    found = i;
  }
  if (!found) {
    throw Error(ErrorCode::UnknownColumn, "unknown column '" + bql::render(column) + "'");
  }
  return *found;
}

ScalarType aggregate_type(const std::string& function, std::optional<ScalarType> arg) {
  if (function == "count") return ScalarType::Int64;
  if (function == "sum" || function == "avg") {
    if (!numeric_or_null(arg)) {
      throw Error(ErrorCode::TypeError, function + " requires a numeric argument");
    }
    if (function == "avg") return ScalarType::Double;
    return arithmetic_type(arg, arg).value();
  }
  return arg.value_or(ScalarType::String);
}

BoundExpr bind_expr(const Expr& e, const Scope& scope, const AggregateSlotter& slotter) {
  BoundExpr b;
  switch (e.kind) {
    case Expr::Kind::Literal:
      b.op = Op::Literal;
      b.literal = e.literal;
      b.type = e.literal.type();
      return b;
    case Expr::Kind::Column:
      b.op = Op::Column;
      b.index = resolve_column(e, scope);
      b.type = scope[b.index].type;
      return b;
    case Expr::Kind::Star:
      throw Error(ErrorCode::SyntaxError, "'*' is only valid inside count(*)");
    case Expr::Kind::Call: {
      if (!slotter) {
        throw Error(ErrorCode::InvalidGrouping,
                    "aggregate '" + bql::render(e) + "' is not allowed here");
      }
      auto [slot, type] = slotter(e);
      b.op = Op::Aggregate;
      b.index = slot;
      b.type = type;
      return b;
    }
    case Expr::Kind::IsNull:
      b.op = e.negated ? Op::IsNotNull : Op::IsNull;
      b.args.push_back(bind_expr(e.args[0], scope, slotter));
      b.type = ScalarType::Bool;
      return b;
    case Expr::Kind::Unary: {
      b.args.push_back(bind_expr(e.args[0], scope, slotter));
      const auto& t = b.args[0].type;
      if (e.name == "NOT") {
        if (!bool_or_null(t)) type_error(e, "NOT requires a boolean");
        b.op = Op::Not;
        b.type = ScalarType::Bool;
      } else {
        if (!numeric_or_null(t)) type_error(e, "unary minus requires a number");
        b.op = Op::Neg;
        b.type = arithmetic_type(t, t);
      }
      return b;
    }
    case Expr::Kind::Binary: {
      b.op = binary_op(e.name);
      b.args.push_back(bind_expr(e.args[0], scope, slotter));
      b.args.push_back(bind_expr(e.args[1], scope, slotter));
      const auto& l = b.args[0].type;
      const auto& r = b.args[1].type;
      switch (b.op) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
          if (!numeric_or_null(l) || !numeric_or_null(r)) {
            type_error(e, "arithmetic requires numbers");
          }
          b.type = arithmetic_type(l, r);
          break;
        case Op::And:
        case Op::Or:
          if (!bool_or_null(l) || !bool_or_null(r)) type_error(e, e.name + " requires booleans");
          b.type = ScalarType::Bool;
          break;
        default:
          if (!comparable(l, r)) type_error(e, "incomparable operands");
          b.type = ScalarType::Bool;
      }
      return b;
    }
  }
  return b;
}

Value evaluate(const BoundExpr& e, std::span<const Value> row, std::span<const Value> aggregates) {
  switch (e.op) {
    case Op::Literal: return e.literal;
    case Op::Column: return row[e.index];
    case Op::Aggregate: return aggregates[e.index];
    case Op::IsNull: return Value(evaluate(e.args[0], row, aggregates).is_null());
    case Op::IsNotNull: return Value(!evaluate(e.args[0], row, aggregates).is_null());
    case Op::Not: {
      const Value v = evaluate(e.args[0], row, aggregates);
      return v.is_null() ? v : Value(!v.as_bool());
    }
    case Op::Neg: {
      const Value v = evaluate(e.args[0], row, aggregates);
      if (v.is_null()) return v;
      if (v.is_integer()) {
        std::int64_t r = 0;
        check_overflow(__builtin_sub_overflow(std::int64_t{0}, v.as_int64(), &r));
        return Value(r);
      }
      return Value(-v.as_double());
    }
    case Op::And: {
      const Value a = evaluate(e.args[0], row, aggregates);
      if (a.is_bool() && !a.as_bool()) return Value(false);
      const Value b = evaluate(e.args[1], row, aggregates);
      if (b.is_bool() && !b.as_bool()) return Value(false);
      if (a.is_null() || b.is_null()) return Value::null();
      return Value(true);
    }
    case Op::Or: {
      const Value a = evaluate(e.args[0], row, aggregates);
      if (a.is_bool() && a.as_bool()) return Value(true);
      const Value b = evaluate(e.args[1], row, aggregates);
      if (b.is_bool() && b.as_bool()) return Value(true);
      if (a.is_null() || b.is_null()) return Value::null();
      return Value(false);
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const Value a = evaluate(e.args[0], row, aggregates);
      const Value b = evaluate(e.args[1], row, aggregates);
      return arithmetic(e.op, a, b);
    }
    default: {
      const Value a = evaluate(e.args[0], row, aggregates);
      const Value b = evaluate(e.args[1], row, aggregates);
      return comparison(e.op, a, b);
    }
  }
}

Accumulator::Accumulator(std::string function, ScalarType result_type)
    : function_(std::move(function)), result_type_(result_type) {}

void Accumulator::add(const Value& v) {
  if (v.is_null()) return;
  ++count_;
  if (function_ == "sum" || function_ == "avg") {
    if (result_type_ == ScalarType::Int64 && v.is_integer()) {
      if (__builtin_add_overflow(int_sum_, v.as_int64(), &int_sum_)) {
        throw Error(ErrorCode::TypeError, "integer overflow in sum");
      }
    } else {
      double_sum_ += v.as_double();
    }
  } else if (function_ == "min") {
    if (count_ == 1 || order_values(v, best_) < 0) best_ = v;
  } else if (function_ == "max") {
    if (count_ == 1 || order_values(v, best_) > 0) best_ = v;
  }
}

Value Accumulator::result() const {
  if (function_ == "count") return Value(count_);
  if (count_ == 0) return Value::null();
  if (function_ == "sum") {
    return result_type_ == ScalarType::Int64 ? Value(int_sum_) : Value(double_sum_);
  }
  if (function_ == "avg") return Value(double_sum_ / static_cast<double>(count_));
  return best_;
}

void split_conjuncts(const Expr& expr, std::vector<const Expr*>& out) {
  if (expr.kind == Expr::Kind::Binary && expr.name == "AND") {
    split_conjuncts(expr.args[0], out);
    split_conjuncts(expr.args[1], out);
    return;
  }
  out.push_back(&expr);
}

void referenced_columns(const BoundExpr& expr, std::vector<std::size_t>& out) {
  if (expr.op == Op::Column) out.push_back(expr.index);
  for (const auto& a : expr.args) referenced_columns(a, out);
}

}  // namespace polydawg::engines
