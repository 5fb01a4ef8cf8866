// Random generator of well-formed ASTs for parse/render round-trip tests.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"

namespace testgen {

using namespace polydawg;
using namespace polydawg::bql;

class AstGenerator {
 public:
  explicit AstGenerator(std::uint64_t seed) : rng_(seed) {}

  Ast query() {
    Ast ast;
    if (pick(8) == 0) {
      ast.node = catalog();
    } else {
      ast.node = island_query(2);
    }
    return ast;
  }

  IslandQuery island_query(int depth) {
    IslandQuery q;
    switch (pick(3)) {
      case 0: q.body = select(depth); break;
      case 1: q.body = array_top(depth); break;
      default: q.body = text(depth); break;
    }
    return q;
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 0; }

  std::string ident() {
    static const std::vector<std::string> names = {
        "a", "b", "val", "dim1", "subject_id", "poe_id", "x_2", "Mixed", "weird name",
        "select", "t", "myarray"};
    return names[pick(static_cast<int>(names.size()))];
  }

  std::string object() {
    static const std::vector<std::string> names = {"t", "myarray", "mimic2v26.d_patients",
                                                   "mimic_logs", "u"};
    return names[pick(static_cast<int>(names.size()))];
  }

  Value literal() {
    switch (pick(7)) {
      case 0: return Value(static_cast<std::int32_t>(pick(2000) - 1000));
      case 1: return Value(static_cast<std::int64_t>(5000000000LL + pick(100)));
      case 2: return Value((pick(400) - 200) / 4.0);
      case 3: return Value(std::string(coin() ? "it's" : "abc"));
      case 4: return Value(coin());
      case 5: return Value::null();
      default: return Value(static_cast<std::int32_t>(pick(10)));
    }
  }

  Expr column() { return Expr::make_column(coin() ? "" : "t", ident()); }

  Expr expr(int depth, bool allow_agg) {
    if (depth <= 0) return coin() ? Expr::make_literal(literal()) : column();
    switch (pick(allow_agg ? 7 : 6)) {
      case 0: return Expr::make_literal(literal());
      case 1: return column();
      case 2: {
        static const std::vector<std::string> ops = {"+", "-", "*", "/", "=", "<>", "<",
                                                     "<=", ">", ">=", "AND", "OR"};
        const auto& op = ops[pick(static_cast<int>(ops.size()))];
        return Expr::make_binary(op, expr(depth - 1, allow_agg), expr(depth - 1, allow_agg));
      }
      case 3: return Expr::make_unary(coin() ? "NOT" : "-", expr(depth - 1, allow_agg));
      case 4: return Expr::make_is_null(expr(depth - 1, allow_agg), coin());
      case 5: return column();
      default: {
        static const std::vector<std::string> fns = {"count", "sum", "avg", "min", "max"};
        const auto& fn = fns[pick(5)];
        if (fn == "count" && coin()) return Expr::make_call(fn, {Expr::make_star()});
        return Expr::make_call(fn, {expr(depth - 1, false)});
      }
    }
  }

  DestSchema dest_schema(Island island) {
    switch (island) {
      case Island::Relational: {
        RelationalSchema s;
        const int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) {
          s.columns.push_back(ColumnDesc{"c" + std::to_string(i),
                                         static_cast<ScalarType>(pick(6))});
        }
        return s;
      }
      case Island::Array: return array_schema();
      case Island::Text: break;
    }
    return TextSchema{ident()};
  }

  ArraySchema array_schema() {
    ArraySchema s;
    const int na = 1 + pick(2);
    for (int i = 0; i < na; ++i) {
      s.attributes.push_back(AttributeDesc{"a" + std::to_string(i),
                                           static_cast<ScalarType>(pick(6))});
    }
    const int nd = 1 + pick(2);
    for (int i = 0; i < nd; ++i) {
      DimensionDesc d;
      d.name = "d" + std::to_string(i);
      d.low = pick(10) - 5;
      if (coin()) d.high = d.low + pick(100);
      d.chunk = 1 + pick(1000);
      d.overlap = pick(3);
      s.dimensions.push_back(d);
    }
    return s;
  }

  CastLeaf cast(int depth) {
    CastLeaf c;
    c.inner = island_query(depth - 1);
    c.intermediate_name = "tmp_" + std::to_string(pick(100));
    c.dest_island = static_cast<Island>(pick(3));
    c.dest_schema = dest_schema(c.dest_island);
    return c;
  }

  ObjectSource source(int depth) {
    if (depth > 0 && pick(4) == 0) return cast(depth);
    return object();
  }

  RelationalSelect select(int depth) {
    RelationalSelect s;
    s.distinct = pick(4) == 0;
    const bool grouped = pick(3) == 0;
    const int nfrom = 1 + pick(2);
    for (int i = 0; i < nfrom; ++i) {
      FromItem f{source(depth), std::nullopt};
      if (coin()) f.alias = "t" + std::to_string(i);
      s.from.push_back(std::move(f));
    }
    if (coin()) s.where = expr(2, false);
    if (grouped) {
      Expr key = Expr::make_column("", ident());
      s.group_by.push_back(key);
      s.projections.push_back(SelectItem{key, std::nullopt});
      s.projections.push_back(SelectItem{
          Expr::make_call("count", {Expr::make_star()}), std::string("n")});
      if (coin()) s.order_by.push_back(OrderItem{Expr::make_column("", "n"), coin()});
    } else if (pick(4) == 0) {
      s.star = true;
    } else {
      const int np = 1 + pick(3);
      for (int i = 0; i < np; ++i) {
        SelectItem item{expr(2, false), std::nullopt};
        if (coin()) item.alias = ident();
        s.projections.push_back(std::move(item));
      }
      if (coin()) s.order_by.push_back(OrderItem{expr(1, false), coin()});
    }
    if (coin()) s.limit = pick(100);
    return s;
  }

  ArrayExpr dataset(int depth) {
    if (depth > 0 && pick(3) == 0) return array_op(depth - 1);
    ArrayRef ref;
    if (depth > 0 && pick(4) == 0) {
      ref.source = cast(depth);
    } else {
      ref.source = object();
    }
    return ArrayExpr{ref};
  }

  ArrayExpr array_top(int depth) { return array_op(depth); }

  ArrayExpr array_op(int depth) {
    ArrayExpr e;
    switch (pick(8)) {
      case 0: e.node = ArrayScan{dataset(depth)}; break;
      case 1: e.node = ArrayProject{dataset(depth), {ident(), ident()}}; break;
      case 2: e.node = ArrayFilter{dataset(depth), expr(2, false)}; break;
      case 3: {
        ArrayAggregate a{dataset(depth), {}, {}};
        a.calls.push_back(AggregateCall{"count", std::nullopt, std::nullopt});
        a.calls.push_back(AggregateCall{"sum", ident(), coin() ? std::optional<std::string>("s")
                                                                : std::nullopt});
        if (coin()) a.group_dims.push_back(ident());
        e.node = std::move(a);
        break;
      }
      case 4: {
        ArrayApply a{dataset(depth), {}};
        a.columns.emplace_back(ident(), expr(2, false));
        e.node = std::move(a);
        break;
      }
      case 5: {
        ArrayCrossJoin j;
        j.left = dataset(depth);
        if (coin()) j.left_alias = "l";
        j.right = dataset(depth);
        if (coin()) j.right_alias = "r";
        if (coin()) j.pairs.emplace_back(DimRef{j.left_alias ? "l" : "", "d0"}, DimRef{"", "d0"});
        e.node = std::move(j);
        break;
      }
      case 6: {
        ArrayRedimension r;
        r.input = dataset(depth);
        if (coin()) {
          r.target = object();
        } else {
          r.target = array_schema();
        }
        e.node = std::move(r);
        break;
      }
      default: {
        ArraySort s{dataset(depth), {}};
        if (coin()) s.attributes.push_back(ident());
        e.node = std::move(s);
        break;
      }
    }
    return e;
  }

  TextQuery text(int depth) {
    TextQuery q;
    q.op = coin() ? TextOp::Scan : TextOp::Range;
    q.table = source(depth);
    if (q.op == TextOp::Range || coin()) {
      TextRange r;
      if (coin() || q.op == TextOp::Range) r.start = TextBound{"r_0001", coin() ? "" : "cf", ""};
      if (coin()) r.end = TextBound{"r_0015", "", coin() ? "" : "it's"};
      q.range = r;
    }
    return q;
  }

  CatalogQuery catalog() {
    CatalogQuery q;
    static const std::vector<std::string> tables = {"engines", "databases", "objects", "shims",
                                                    "casts"};
    q.table = tables[pick(5)];
    if (coin()) q.columns = {"name"};
    if (coin()) q.filter = CatalogFilter{"name", Value(std::string("postgres1"))};
    return q;
  }

  std::mt19937_64 rng_;
};

}  // namespace testgen
