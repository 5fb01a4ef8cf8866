// Naive per-operator array evaluator over unordered cell lists, plus a random
// expression generator. Scalar expressions reuse the relational oracle's
// interpreter.
#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/engines/data.hpp"
#include "polydawg/error.hpp"
#include "rel_oracle.hpp"

namespace oracle {

struct NaiveArray {
  std::vector<std::string> dims;
  std::vector<std::string> attrs;
  std::vector<std::pair<Coordinates, Row>> cells;
};

inline NaiveArray from_object(const ArrayObject& a) {
  NaiveArray n;
  for (const auto& d : a.schema.dimensions) n.dims.push_back(d.name);
  for (const auto& x : a.schema.attributes) n.attrs.push_back(x.name);
  for (const auto& [c, r] : a.cells) n.cells.emplace_back(c, r);
  return n;
}

/// Canonical form: cells sorted by coordinates.
inline NaiveArray canonical(NaiveArray a) {
  std::sort(a.cells.begin(), a.cells.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return a;
}

inline bool same_array(const NaiveArray& x, const NaiveArray& y) {
  if (x.dims != y.dims || x.attrs != y.attrs || x.cells.size() != y.cells.size()) return false;
  const NaiveArray a = canonical(x);
  const NaiveArray b = canonical(y);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    if (a.cells[i].first != b.cells[i].first) return false;
    const Row& r = a.cells[i].second;
    const Row& s = b.cells[i].second;
    if (r.size() != s.size()) return false;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (!same_value(r[k], s[k])) return false;
    }
  }
  return true;
}

inline Value eval_cell(const Expr& e, const NaiveArray& a, const Coordinates& c, const Row& attrs) {
  RelationalTable t;
  Row row;
  for (std::size_t i = 0; i < a.dims.size(); ++i) {
    t.columns.push_back({a.dims[i], ScalarType::Int64});
    row.emplace_back(c[i]);
  }
  for (std::size_t i = 0; i < a.attrs.size(); ++i) {
    t.columns.push_back({a.attrs[i], ScalarType::String});
    row.push_back(attrs[i]);
  }
  std::vector<std::vector<std::string>> quals{{}};
  std::vector<const RelationalTable*> tables{&t};
  Env env{&quals, &tables, {&row}};
  return eval(e, env);
}

inline std::size_t index_of(const std::vector<std::string>& names, const std::string& n) {
  auto it = std::find(names.begin(), names.end(), n);
  if (it == names.end()) throw Error(ErrorCode::UnknownAttribute, n);
  return static_cast<std::size_t>(it - names.begin());
}

inline std::string fresh(const std::string& name, const std::set<std::string>& taken) {
  std::string c = name;
  while (taken.count(c)) c += "_2";
  return c;
}

inline NaiveArray naive_eval(const ArrayExpr& e, const std::map<std::string, ArrayObject>& arrays);

inline NaiveArray naive_ref(const ArrayRef& r, const std::map<std::string, ArrayObject>& arrays) {
  auto it = arrays.find(std::get<std::string>(r.source));
  if (it == arrays.end()) throw Error(ErrorCode::UnknownArray, "array");
  return from_object(it->second);
}

inline NaiveArray naive_eval(const ArrayExpr& e, const std::map<std::string, ArrayObject>& arrays) {
  if (const auto* r = std::get_if<ArrayRef>(&e.node)) return naive_ref(*r, arrays);
  if (const auto* n = std::get_if<ArrayScan>(&e.node)) return naive_eval(*n->input, arrays);
  if (const auto* n = std::get_if<ArrayProject>(&e.node)) {
    NaiveArray in = naive_eval(*n->input, arrays);
    NaiveArray out;
    out.dims = in.dims;
    std::vector<std::size_t> idx;
    for (const auto& a : n->attributes) {
      idx.push_back(index_of(in.attrs, a));
      out.attrs.push_back(a);
    }
    for (const auto& [c, r] : in.cells) {
      Row row;
      for (auto i : idx) row.push_back(r[i]);
      out.cells.emplace_back(c, row);
    }
    return out;
  }
  if (const auto* n = std::get_if<ArrayFilter>(&e.node)) {
    NaiveArray in = naive_eval(*n->input, arrays);
    NaiveArray out{in.dims, in.attrs, {}};
    for (const auto& [c, r] : in.cells) {
      const Value v = eval_cell(n->predicate, in, c, r);
      if (v.is_bool() && v.as_bool()) out.cells.emplace_back(c, r);
    }
    return out;
  }
  if (const auto* n = std::get_if<ArrayApply>(&e.node)) {
    NaiveArray in = naive_eval(*n->input, arrays);
    NaiveArray out{in.dims, in.attrs, {}};
    for (const auto& [name, _] : n->columns) {
      const bool taken = std::count(out.attrs.begin(), out.attrs.end(), name) ||
                         std::count(out.dims.begin(), out.dims.end(), name);
      if (taken) throw Error(ErrorCode::DuplicateName, name);
      out.attrs.push_back(name);
    }
    for (const auto& [c, r] : in.cells) {
      Row row = r;
      for (const auto& [_, expr] : n->columns) row.push_back(eval_cell(expr, in, c, r));
      out.cells.emplace_back(c, row);
    }
    return out;
  }
  if (const auto* n = std::get_if<ArrayAggregate>(&e.node)) {
    NaiveArray in = naive_eval(*n->input, arrays);
    NaiveArray out;
    for (const auto& call : n->calls) out.attrs.push_back(call.output_name());
    std::vector<std::size_t> gidx;
    for (const auto& g : n->group_dims) {
      gidx.push_back(index_of(in.dims, g));
      out.dims.push_back(g);
    }
    if (gidx.empty()) out.dims.push_back("i");
    std::vector<Coordinates> keys;
    for (const auto& [c, _] : in.cells) {
      Coordinates k;
      for (auto g : gidx) k.push_back(c[g]);
      if (gidx.empty()) k.push_back(0);
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    for (const auto& k : keys) {
      Row row;
      for (const auto& call : n->calls) {
        std::vector<Value> values;
        for (const auto& [c, r] : in.cells) {
          Coordinates ck;
          for (auto g : gidx) ck.push_back(c[g]);
          if (gidx.empty()) ck.push_back(0);
          if (ck != k) continue;
          values.push_back(call.attribute ? r[index_of(in.attrs, *call.attribute)] : Value(true));
        }
        row.push_back(aggregate(call.function, values, !call.attribute));
      }
      out.cells.emplace_back(k, row);
    }
    return out;
  }
  if (const auto* n = std::get_if<ArrayCrossJoin>(&e.node)) {
    NaiveArray l = naive_eval(*n->left, arrays);
    NaiveArray r = naive_eval(*n->right, arrays);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& [a, b] : n->pairs) pairs.emplace_back(index_of(l.dims, a.name), index_of(r.dims, b.name));
    NaiveArray out;
    std::set<std::string> taken(l.dims.begin(), l.dims.end());
    taken.insert(l.attrs.begin(), l.attrs.end());
    out.dims = l.dims;
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < r.dims.size(); ++j) {
      bool paired = false;
      for (const auto& p : pairs) paired = paired || p.second == j;
      if (paired) continue;
      free.push_back(j);
      out.dims.push_back(fresh(r.dims[j], taken));
      taken.insert(out.dims.back());
    }
    out.attrs = l.attrs;
    for (const auto& a : r.attrs) {
      out.attrs.push_back(fresh(a, taken));
      taken.insert(out.attrs.back());
    }
    for (const auto& [lc, lr] : l.cells) {
      for (const auto& [rc, rr] : r.cells) {
        bool match = true;
        for (const auto& p : pairs) match = match && lc[p.first] == rc[p.second];
        if (!match) continue;
        Coordinates c = lc;
        for (auto j : free) c.push_back(rc[j]);
        Row row = lr;
        row.insert(row.end(), rr.begin(), rr.end());
        out.cells.emplace_back(c, row);
      }
    }
    return out;
  }
  if (const auto* n = std::get_if<ArrayRedimension>(&e.node)) {
    NaiveArray in = naive_eval(*n->input, arrays);
    const ArraySchema& target = std::get<ArraySchema>(n->target);
    NaiveArray out;
    for (const auto& d : target.dimensions) out.dims.push_back(d.name);
    for (const auto& a : target.attributes) out.attrs.push_back(a.name);
    for (const auto& [c, r] : in.cells) {
      auto get = [&](const std::string& name) -> Value {
        for (std::size_t i = 0; i < in.dims.size(); ++i) {
          if (in.dims[i] == name) return Value(c[i]);
        }
        return r[index_of(in.attrs, name)];
      };
      Coordinates nc;
      for (const auto& d : target.dimensions) {
        const std::int64_t v = get(d.name).as_int64();
        if (v < d.low || (d.high && v > *d.high)) throw Error(ErrorCode::OutOfBounds, "oob");
        nc.push_back(v);
      }
      for (const auto& existing : out.cells) {
        if (existing.first == nc) throw Error(ErrorCode::RedimensionCollision, "collision");
      }
      Row row;
      for (const auto& a : target.attributes) row.push_back(get(a.name));
      out.cells.emplace_back(nc, row);
    }
    return out;
  }
  const auto& n = std::get<ArraySort>(e.node);
  NaiveArray in = canonical(naive_eval(*n.input, arrays));
  std::vector<std::size_t> keys;
  for (const auto& a : n.attributes) keys.push_back(index_of(in.attrs, a));
  if (keys.empty()) {
    for (std::size_t i = 0; i < in.attrs.size(); ++i) keys.push_back(i);
  }
  std::vector<Row> rows;
  for (const auto& [_, r] : in.cells) rows.push_back(r);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t j = i; j > 0; --j) {
      bool less = false;
      for (auto k : keys) {
        auto c = order_values(rows[j][k], rows[j - 1][k]);
        if (c == 0) continue;
        less = c < 0;
        break;
      }
      if (!less) break;
      std::swap(rows[j], rows[j - 1]);
    }
  }
  NaiveArray out;
  out.dims = {"n"};
  out.attrs = in.attrs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.cells.emplace_back(Coordinates{static_cast<std::int64_t>(i)}, rows[i]);
  }
  return out;
}

/// Arrays A<v:int32,w:double>[i=0:9,j=0:4] and B<v:int32,x:double>[i=0:9,k=0:2]
/// with random sparse cells, and operator trees over them.
class ArrayGenerator {
 public:
  explicit ArrayGenerator(std::uint64_t seed) : rng_(seed) {}

  std::map<std::string, ArrayObject> arrays() {
    std::map<std::string, ArrayObject> out;
    out["A"] = make({"v", "w"}, {{"i", 9}, {"j", 4}});
    out["B"] = make({"v", "x"}, {{"i", 9}, {"k", 2}});
    return out;
  }

  ArrayExpr expr(int depth) {
    if (depth == 0) return leaf();
    ArrayExpr e;
    switch (pick(8)) {
      case 0: e.node = ArrayScan{expr(depth - 1)}; break;
      case 1: {
        ArrayExpr in = leaf();
        e.node = ArrayProject{in, {"v"}};
        if (pick(2)) std::get<ArrayProject>(e.node).attributes.push_back(second_attr(in));
        break;
      }
      case 2: e.node = ArrayFilter{expr(depth - 1), predicate()}; break;
      case 3: {
        ArrayExpr in = leaf();
        ArrayAggregate a{in, {}, {}};
        a.calls.push_back(AggregateCall{"count", std::nullopt, std::nullopt});
        static const char* fns[] = {"sum", "avg", "min", "max"};
        a.calls.push_back(AggregateCall{fns[pick(4)], pick(2) ? "v" : second_attr(in), std::nullopt});
        if (pick(2)) a.group_dims.push_back("i");
        e.node = std::move(a);
        break;
      }
      case 4: {
        ArrayApply a{expr(depth - 1), {}};
        a.columns.emplace_back(pick(2) ? "z" : "y", arithmetic());
        e.node = std::move(a);
        break;
      }
      case 5: {
        ArrayCrossJoin j;
        j.left = leaf_named("A");
        j.right = leaf_named(pick(2) ? "A" : "B");
        j.pairs.emplace_back(DimRef{"", "i"}, DimRef{"", "i"});
        if (pick(3) == 0) j.pairs.clear();
        e.node = std::move(j);
        break;
      }
      case 6: {
        // Swap dimension j with attribute v: v becomes a coordinate.
        ArrayRedimension r;
        r.input = leaf_named("A");
        ArraySchema s;
        s.attributes = {{"j", ScalarType::Int64}, {"w", ScalarType::Double}};
        s.dimensions = {{"i", 0, 9, 10, 0}, {"v", 0, 20, 21, 0}};
        r.target = s;
        e.node = std::move(r);
        break;
      }
      default: {
        ArrayExpr in = expr(depth - 1);
        e.node = ArraySort{in, {}};
        break;
      }
    }
    return e;
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  ArrayObject make(std::vector<std::string> attrs, std::vector<std::pair<std::string, int>> dims) {
    ArrayObject a;
    a.schema.attributes = {{attrs[0], ScalarType::Int32}, {attrs[1], ScalarType::Double}};
    for (const auto& [name, high] : dims) a.schema.dimensions.push_back({name, 0, high, 5, 0});
    const int density = 1 + pick(4);
    for (std::int64_t x = 0; x <= dims[0].second; ++x) {
      for (std::int64_t y = 0; y <= dims[1].second; ++y) {
        if (pick(5) >= density) continue;
        a.cells[{x, y}] = Row{Value(static_cast<std::int32_t>(pick(21))), Value((pick(41) - 20) / 4.0)};
      }
    }
    return a;
  }

  ArrayExpr leaf_named(const std::string& name) { return ArrayExpr{ArrayRef{name}}; }
  ArrayExpr leaf() { return leaf_named("A"); }

  std::string second_attr(const ArrayExpr& in) {
    const auto* r = std::get_if<ArrayRef>(&in.node);
    return r && std::get<std::string>(r->source) == "B" ? "x" : "w";
  }

  Expr operand() {
    switch (pick(4)) {
      case 0: return Expr::make_column("", "i");
      case 1: return Expr::make_column("", "v");
      case 2: return Expr::make_column("", "j");
      default: return Expr::make_literal(Value(static_cast<std::int32_t>(pick(10))));
    }
  }

  Expr arithmetic() {
    static const char* ops[] = {"+", "-", "*"};
    Expr e = Expr::make_binary(ops[pick(3)], operand(), operand());
    if (pick(3) == 0) e = Expr::make_binary("/", std::move(e), Expr::make_literal(Value(2.0)));
    return e;
  }

  Expr predicate() {
    static const char* cmps[] = {"=", "<>", "<", "<=", ">", ">="};
    Expr p = Expr::make_binary(cmps[pick(6)], operand(),
                               Expr::make_literal(Value(static_cast<std::int32_t>(pick(10)))));
    if (pick(3) == 0) {
      p = Expr::make_binary(pick(2) ? "AND" : "OR", std::move(p),
                            Expr::make_binary(">", Expr::make_column("", "v"),
                                              Expr::make_literal(Value(static_cast<std::int32_t>(pick(15))))));
    }
    return p;
  }

  std::mt19937_64 rng_;
};

}  // namespace oracle
