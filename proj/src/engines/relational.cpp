#include "polydawg/engines/relational.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "polydawg/bql/render.hpp"
#include "polydawg/engines/expr.hpp"
#include "polydawg/error.hpp"

namespace polydawg::engines {

using bql::Expr;

namespace {

struct RowHash {
  std::size_t operator()(const Row& row) const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& v : row) h = (h ^ hash_value(v)) * 0x100000001b3ULL;
    return h;
  }
};

struct RowEq {
  bool operator()(const Row& a, const Row& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!same_value(a[i], b[i])) return false;
    }
    return true;
  }
};

bool is_true(const Value& v) { return v.is_bool() && v.as_bool(); }

void shift(BoundExpr& e, std::size_t offset) {
  if (e.op == BoundExpr::Op::Column) e.index -= offset;
  for (auto& a : e.args) shift(a, offset);
}

struct EquiKey {
  BoundExpr outer;  // over the joined prefix
  BoundExpr inner;  // over the new table's rows
};

struct Stage {
  std::shared_ptr<const RelationalTable> table;
  std::size_t offset = 0;
  std::vector<BoundExpr> local;  // shifted to the table's own row layout
  std::vector<EquiKey> keys;
  std::vector<BoundExpr> post;   // over prefix + this table
};

struct AggregateSlot {
  Expr call;
  std::optional<BoundExpr> argument;  // nullopt for count(*)
  ScalarType type;
};

struct OrderKey {
  std::optional<std::size_t> output;  // index into the projected row
  BoundExpr expr;
  bool descending = false;
};

std::string output_name(const bql::SelectItem& item) {
  if (item.alias) return *item.alias;
  if (item.expr.kind == Expr::Kind::Column) return item.expr.name;
  if (item.expr.kind == Expr::Kind::Call) return item.expr.name;
  return "?column?";
}

void require_boolean(const BoundExpr& e, const Expr& source) {
  if (e.type && *e.type != ScalarType::Bool) {
    throw Error(ErrorCode::TypeError, "WHERE condition must be boolean, got " +
                                          std::string(to_string(*e.type)) + " in '" +
                                          bql::render(source) + "'");
  }
}

Row concat(const Row& a, const Row& b) {
  Row out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

bool passes(const std::vector<BoundExpr>& filters, const Row& row) {
  for (const auto& f : filters) {
    if (!is_true(evaluate(f, row))) return false;
  }
  return true;
}

std::optional<Row> key_of(const std::vector<EquiKey>& keys, const Row& row, bool outer) {
  Row key;
  key.reserve(keys.size());
  for (const auto& k : keys) {
    Value v = evaluate(outer ? k.outer : k.inner, row);
    if (v.is_null()) return std::nullopt;
    key.push_back(std::move(v));
  }
  return key;
}

class SelectRunner {
 public:
  SelectRunner(const bql::RelationalSelect& select, const TableLookup& lookup)
      : select_(select) {
    for (const auto& item : select.from) {
      Stage stage;
      stage.table = lookup(item.object_name());
      stage.offset = scope_.size();
      std::vector<std::string> qualifiers;
      if (item.alias) {
        qualifiers.push_back(*item.alias);
      } else {
        const std::string& name = item.object_name();
        qualifiers.push_back(name);
        const auto dot = name.rfind('.');
        if (dot != std::string::npos) qualifiers.push_back(name.substr(dot + 1));
      }
      for (const auto& col : stage.table->columns) {
        scope_.push_back(ScopeColumn{qualifiers, col.name, col.type});
      }
      stages_.push_back(std::move(stage));
    }
  }

  RelationalTable run() {
    plan_where();
    std::optional<std::size_t> cap;
    if (select_.limit && !select_.is_grouped() && !select_.distinct && select_.order_by.empty()) {
      cap = static_cast<std::size_t>(*select_.limit);
    }
    const std::vector<Row> joined = join(cap);
    return select_.is_grouped() ? project_grouped(joined) : project_plain(joined);
  }

 private:
  std::size_t stage_of(std::size_t column) const {
    std::size_t k = 0;
    while (k + 1 < stages_.size() && stages_[k + 1].offset <= column) ++k;
    return k;
  }

  std::vector<std::size_t> stages_of(const BoundExpr& e) const {
    std::vector<std::size_t> cols;
    referenced_columns(e, cols);
    std::vector<std::size_t> out;
    for (auto c : cols) out.push_back(stage_of(c));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void plan_where() {
    if (!select_.where) return;
    std::vector<const Expr*> conjuncts;
    split_conjuncts(*select_.where, conjuncts);
    for (const Expr* c : conjuncts) {
      BoundExpr b = bind_expr(*c, scope_);
      require_boolean(b, *c);
      const auto used = stages_of(b);
      if (used.size() <= 1) {
        Stage& s = stages_[used.empty() ? 0 : used[0]];
        shift(b, s.offset);
        s.local.push_back(std::move(b));
        continue;
      }
      const std::size_t k = used.back();
      Stage& s = stages_[k];
      if (b.op == BoundExpr::Op::Eq) {
        const auto lhs = stages_of(b.args[0]);
        const auto rhs = stages_of(b.args[1]);
        auto only_k = [&](const std::vector<std::size_t>& v) { return v.size() == 1 && v[0] == k; };
        auto before_k = [&](const std::vector<std::size_t>& v) { return !v.empty() && v.back() < k; };
        if (only_k(lhs) && before_k(rhs)) {
          shift(b.args[0], s.offset);
          s.keys.push_back(EquiKey{std::move(b.args[1]), std::move(b.args[0])});
          continue;
        }
        if (only_k(rhs) && before_k(lhs)) {
          shift(b.args[1], s.offset);
          s.keys.push_back(EquiKey{std::move(b.args[0]), std::move(b.args[1])});
          continue;
        }
      }
      s.post.push_back(std::move(b));
    }
  }

  /// Joined rows in nested-loop order; at most `cap` rows when set.
  std::vector<Row> join(std::optional<std::size_t> cap) const {
    std::vector<Row> current{Row{}};
    for (std::size_t k = 0; k < stages_.size(); ++k) {
      const Stage& s = stages_[k];
      const bool last = k + 1 == stages_.size();
      if (last && cap && s.keys.empty()) {
        std::vector<Row> next;
        for (const Row& prefix : current) {
          for (const auto& r : s.table->rows) {
            if (next.size() >= *cap) return next;
            if (!passes(s.local, r)) continue;
            Row joined = concat(prefix, r);
            if (passes(s.post, joined)) next.push_back(std::move(joined));
          }
        }
        return next;
      }
      std::vector<const Row*> rows;
      for (const auto& r : s.table->rows) {
        if (passes(s.local, r)) rows.push_back(&r);
      }
      std::vector<Row> next;
      if (!s.keys.empty()) {
        std::unordered_map<Row, std::vector<const Row*>, RowHash, RowEq> index;
        for (const Row* r : rows) {
          if (auto key = key_of(s.keys, *r, false)) index[std::move(*key)].push_back(r);
        }
        for (const Row& prefix : current) {
          auto key = key_of(s.keys, prefix, true);
          if (!key) continue;
          auto it = index.find(*key);
          if (it == index.end()) continue;
          for (const Row* r : it->second) {
            Row joined = concat(prefix, *r);
            if (passes(s.post, joined)) next.push_back(std::move(joined));
          }
        }
      } else {
        for (const Row& prefix : current) {
          for (const Row* r : rows) {
            Row joined = concat(prefix, *r);
            if (passes(s.post, joined)) next.push_back(std::move(joined));
          }
        }
      }
      current = std::move(next);
    }
    return current;
  }

  AggregateSlotter slotter() {
    return [this](const Expr& call) -> std::pair<std::size_t, ScalarType> {
      for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].call == call) return {i, slots_[i].type};
      }
      AggregateSlot slot{call, std::nullopt, ScalarType::Int64};
      std::optional<ScalarType> arg_type;
      if (call.args.at(0).kind != Expr::Kind::Star) {
        slot.argument = bind_expr(call.args[0], scope_);
        arg_type = slot.argument->type;
      }
      slot.type = aggregate_type(call.name, arg_type);
      slots_.push_back(std::move(slot));
      return {slots_.size() - 1, slots_.back().type};
    };
  }

  /// Binds projections and ORDER BY keys; fills `out` columns.
  void bind_outputs(RelationalTable& out, const AggregateSlotter& slot_fn) {
    if (select_.star) {
      for (std::size_t i = 0; i < scope_.size(); ++i) {
        out.columns.push_back(bql::ColumnDesc{scope_[i].name, scope_[i].type});
        BoundExpr e;
        e.op = BoundExpr::Op::Column;
        e.index = i;
        e.type = scope_[i].type;
        projections_.push_back(std::move(e));
      }
    } else {
      for (const auto& item : select_.projections) {
        BoundExpr e = bind_expr(item.expr, scope_, slot_fn);
        out.columns.push_back(bql::ColumnDesc{output_name(item), e.type.value_or(ScalarType::String)});
        projections_.push_back(std::move(e));
      }
    }
    for (const auto& item : select_.order_by) {
      OrderKey key;
      key.descending = item.descending;
      if (item.expr.kind == Expr::Kind::Column && item.expr.qualifier.empty()) {
        key.output = out.column_index(item.expr.name);
      }
      if (!key.output) key.expr = bind_expr(item.expr, scope_, slot_fn);
      order_.push_back(std::move(key));
    }
  }

  struct Produced {
    Row values;
    Row sort_keys;
  };

  Produced produce(const Row& input, std::span<const Value> aggregates) const {
    Produced p;
    p.values.reserve(projections_.size());
    for (const auto& e : projections_) p.values.push_back(evaluate(e, input, aggregates));
    for (const auto& k : order_) {
      p.sort_keys.push_back(k.output ? p.values[*k.output] : evaluate(k.expr, input, aggregates));
    }
    return p;
  }

  RelationalTable finish(RelationalTable out, std::vector<Produced> produced) const {
    if (select_.distinct) {
      std::unordered_set<Row, RowHash, RowEq> seen;
      std::vector<Produced> kept;
      for (auto& p : produced) {
        if (seen.insert(p.values).second) kept.push_back(std::move(p));
      }
      produced = std::move(kept);
    }
    if (!order_.empty()) {
      std::stable_sort(produced.begin(), produced.end(), [&](const Produced& a, const Produced& b) {
        for (std::size_t i = 0; i < order_.size(); ++i) {
          auto c = order_values(a.sort_keys[i], b.sort_keys[i]);
          if (c == 0) continue;
          return order_[i].descending ? c > 0 : c < 0;
        }
        return false;
      });
    }
    std::size_t n = produced.size();
    if (select_.limit) n = std::min<std::size_t>(n, static_cast<std::size_t>(*select_.limit));
    out.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.rows.push_back(std::move(produced[i].values));
    return out;
  }

  RelationalTable project_plain(const std::vector<Row>& rows) {
    RelationalTable out;
    bind_outputs(out, {});
    std::vector<Produced> produced;
    produced.reserve(rows.size());
    for (const Row& r : rows) produced.push_back(produce(r, {}));
    return finish(std::move(out), std::move(produced));
  }

  RelationalTable project_grouped(const std::vector<Row>& rows) {
    RelationalTable out;
    std::vector<BoundExpr> group_keys;
    for (const auto& g : select_.group_by) group_keys.push_back(bind_expr(g, scope_));
    bind_outputs(out, slotter());

    struct Group {
      const Row* representative;
      std::vector<Accumulator> accumulators;
    };
    std::vector<Group> groups;
    std::unordered_map<Row, std::size_t, RowHash, RowEq> index;
    auto new_group = [&](const Row* rep) {
      Group g{rep, {}};
      for (const auto& s : slots_) g.accumulators.emplace_back(s.call.name, s.type);
      groups.push_back(std::move(g));
      return groups.size() - 1;
    };
    for (const Row& r : rows) {
      Row key;
      for (const auto& g : group_keys) key.push_back(evaluate(g, r));
      auto [it, inserted] = index.try_emplace(std::move(key), 0);
      if (inserted) it->second = new_group(&r);
      Group& g = groups[it->second];
      for (std::size_t i = 0; i < slots_.size(); ++i) {
        g.accumulators[i].add(slots_[i].argument ? evaluate(*slots_[i].argument, r) : Value(true));
      }
    }
    const Row nulls(scope_.size());
    if (groups.empty() && group_keys.empty()) new_group(&nulls);

    std::vector<Produced> produced;
    for (const Group& g : groups) {
      Row aggregates;
      for (const auto& a : g.accumulators) aggregates.push_back(a.result());
      produced.push_back(produce(*g.representative, aggregates));
    }
    return finish(std::move(out), std::move(produced));
  }

  const bql::RelationalSelect& select_;
  Scope scope_;
  std::vector<Stage> stages_;
  std::vector<AggregateSlot> slots_;
  std::vector<BoundExpr> projections_;
  std::vector<OrderKey> order_;
};

}  // namespace

RelationalTable execute_select(const bql::RelationalSelect& select, const TableLookup& lookup) {
  return SelectRunner(select, lookup).run();
}

Row conform_row(const std::vector<bql::ColumnDesc>& columns, const Row& row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::TypeError, "row has " + std::to_string(row.size()) +
                                          " values, table has " +
                                          std::to_string(columns.size()) + " columns");
  }
  Row out;
  out.reserve(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) out.push_back(coerce(row[i], columns[i].type));
  return out;
}

void RelationalEngine::create_table(const std::string& name, std::vector<bql::ColumnDesc> columns) {
  if (columns.empty()) throw Error(ErrorCode::InvalidArgument, "table needs at least one column");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (columns[i].name == columns[j].name) {
        throw Error(ErrorCode::DuplicateName, "duplicate column '" + columns[i].name + "'");
      }
    }
  }
  RelationalTable t;
  t.columns = std::move(columns);
  tables_.put(name, std::move(t), false);
}

void RelationalEngine::insert_rows(const std::string& name, const std::vector<Row>& rows) {
  count_call();
  tables_.update(name, [&](RelationalTable& t) {
    std::vector<Row> conformed;
    conformed.reserve(rows.size());
    for (const auto& r : rows) conformed.push_back(conform_row(t.columns, r));
    t.rows.insert(t.rows.end(), std::make_move_iterator(conformed.begin()),
                  std::make_move_iterator(conformed.end()));
  });
}

std::shared_ptr<const RelationalTable> RelationalEngine::table(const std::string& name) const {
  return tables_.get(name);
}

RelationalTable RelationalEngine::select(const bql::RelationalSelect& select,
                                         const Bindings& bindings) const {
  return execute_select(select, [&](const std::string& name) {
    return tables_.get(physical_name(bindings, name));
  });
}

ResultSet RelationalEngine::execute(const bql::IslandQuery& query, const Bindings& bindings) const {
  count_call();
  const auto* select = std::get_if<bql::RelationalSelect>(&query.body);
  if (!select) {
    throw Error(ErrorCode::ShimUnsupported,
                std::string(to_string(query.island())) + " query sent to a relational engine");
  }
  return ResultSet{this->select(*select, bindings)};
}

ResultSet RelationalEngine::read_object(const std::string& name) const {
  count_call();
  return ResultSet{*tables_.get(name)};
}

void RelationalEngine::write_object(const std::string& name, ResultSet data, bool replace) {
  count_call();
  auto* table = std::get_if<RelationalTable>(&data.data);
  if (!table) throw Error(ErrorCode::SchemaMismatch, "relational engine stores only tables");
  for (auto& row : table->rows) row = conform_row(table->columns, row);
  tables_.put(name, std::move(*table), replace);
}

std::size_t RelationalEngine::object_size(const std::string& name) const {
  return tables_.get(name)->rows.size();
}

}  // namespace polydawg::engines
