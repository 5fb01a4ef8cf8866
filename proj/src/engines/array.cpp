#include "polydawg/engines/array.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "polydawg/bql/render.hpp"
#include "polydawg/engines/expr.hpp"

namespace polydawg::engines {

using bql::ArrayExpr;
using bql::ArraySchema;
using bql::AttributeDesc;
using bql::DimensionDesc;

namespace {

std::string coords_text(const Coordinates& c) {
  std::string out = "{";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(c[i]);
  }
  return out + "}";
}

/// Dimensions then attributes, as one row layout for expressions.
Scope cell_scope(const ArraySchema& schema) {
  Scope scope;
  for (const auto& d : schema.dimensions) scope.push_back(ScopeColumn{{}, d.name, ScalarType::Int64});
  for (const auto& a : schema.attributes) scope.push_back(ScopeColumn{{}, a.name, a.type});
  return scope;
}

Row cell_row(const Coordinates& coords, const Row& attrs) {
  Row row;
  row.reserve(coords.size() + attrs.size());
  for (auto c : coords) row.emplace_back(c);
  row.insert(row.end(), attrs.begin(), attrs.end());
  return row;
}

std::size_t attribute_position(const ArraySchema& schema, const std::string& name) {
  auto i = schema.attribute_index(name);
  if (!i) throw Error(ErrorCode::UnknownAttribute, "unknown attribute '" + name + "'");
  return *i;
}

std::size_t dimension_position(const ArraySchema& schema, const std::string& name) {
  auto i = schema.dimension_index(name);
  if (!i) throw Error(ErrorCode::UnknownAttribute, "unknown dimension '" + name + "'");
  return *i;
}

/// Name an operand is addressed by in cross_join dimension references.
std::optional<std::string> base_name(const ArrayExpr& e) {
  if (const auto* ref = std::get_if<bql::ArrayRef>(&e.node)) {
    if (const auto* name = std::get_if<std::string>(&ref->source)) return *name;
    return std::get<bql::CastLeaf>(ref->source).intermediate_name;
  }
  if (const auto* scan = std::get_if<bql::ArrayScan>(&e.node)) return base_name(*scan->input);
  return std::nullopt;
}

std::string unique_name(const std::string& name, const std::set<std::string>& taken) {
  std::string candidate = name;
  while (taken.count(candidate)) candidate += "_2";
  return candidate;
}

class Evaluator {
 public:
  explicit Evaluator(const ArrayLookup& lookup) : lookup_(lookup) {}

  ArrayObject operator()(const ArrayExpr& e) const {
    return std::visit([this](const auto& node) { return eval(node); }, e.node);
  }

 private:
  ArrayObject eval(const bql::ArrayRef& ref) const {
    if (const auto* name = std::get_if<std::string>(&ref.source)) return *lookup_(*name);
    return *lookup_(std::get<bql::CastLeaf>(ref.source).intermediate_name);
  }

  ArrayObject eval(const bql::ArrayScan& n) const { return (*this)(*n.input); }

  ArrayObject eval(const bql::ArrayProject& n) const {
    ArrayObject in = (*this)(*n.input);
    std::vector<std::size_t> keep;
    for (const auto& a : n.attributes) keep.push_back(attribute_position(in.schema, a));
    ArrayObject out;
    out.schema.dimensions = in.schema.dimensions;
    for (auto k : keep) out.schema.attributes.push_back(in.schema.attributes[k]);
    validate_schema(out.schema);
    for (auto& [coords, attrs] : in.cells) {
      Row row;
      for (auto k : keep) row.push_back(attrs[k]);
      out.cells.emplace_hint(out.cells.end(), coords, std::move(row));
    }
    return out;
  }

  ArrayObject eval(const bql::ArrayFilter& n) const {
    ArrayObject in = (*this)(*n.input);
    const BoundExpr pred = bind_expr(n.predicate, cell_scope(in.schema));
    if (pred.type && *pred.type != ScalarType::Bool) {
      throw Error(ErrorCode::TypeError, "filter predicate must be boolean in '" +
                                            bql::render(n.predicate) + "'");
    }
    ArrayObject out;
    out.schema = in.schema;
    for (auto& [coords, attrs] : in.cells) {
      const Value v = evaluate(pred, cell_row(coords, attrs));
      if (v.is_bool() && v.as_bool()) out.cells.emplace_hint(out.cells.end(), coords, attrs);
    }
    return out;
  }

  ArrayObject eval(const bql::ArrayAggregate& n) const {
    ArrayObject in = (*this)(*n.input);
    std::vector<std::optional<std::size_t>> inputs;
    ArrayObject out;
    for (const auto& call : n.calls) {
      std::optional<std::size_t> pos;
      std::optional<ScalarType> arg_type;
      if (call.attribute) {
        pos = attribute_position(in.schema, *call.attribute);
        arg_type = in.schema.attributes[*pos].type;
      }
      inputs.push_back(pos);
      out.schema.attributes.push_back(
          AttributeDesc{call.output_name(), aggregate_type(call.function, arg_type)});
    }
    std::vector<std::size_t> group;
    for (const auto& d : n.group_dims) {
      group.push_back(dimension_position(in.schema, d));
      out.schema.dimensions.push_back(in.schema.dimensions[group.back()]);
    }
    if (group.empty()) out.schema.dimensions.push_back(DimensionDesc{"i", 0, 0, 1, 0});
    validate_schema(out.schema);

    std::map<Coordinates, std::vector<Accumulator>> groups;
    for (const auto& [coords, attrs] : in.cells) {
      Coordinates key;
      for (auto g : group) key.push_back(coords[g]);
      if (group.empty()) key.push_back(0);
      auto it = groups.find(key);
      if (it == groups.end()) {
        std::vector<Accumulator> accs;
        for (std::size_t i = 0; i < n.calls.size(); ++i) {
          accs.emplace_back(n.calls[i].function, out.schema.attributes[i].type);
        }
        it = groups.emplace(key, std::move(accs)).first;
      }
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        it->second[i].add(inputs[i] ? attrs[*inputs[i]] : Value(true));
      }
    }
    for (const auto& [key, accs] : groups) {
      Row row;
      for (const auto& a : accs) row.push_back(a.result());
      out.cells.emplace(key, std::move(row));
    }
    return out;
  }

  ArrayObject eval(const bql::ArrayApply& n) const {
    ArrayObject in = (*this)(*n.input);
    const Scope scope = cell_scope(in.schema);
    std::vector<BoundExpr> exprs;
    ArrayObject out;
    out.schema = in.schema;
    for (const auto& [name, expr] : n.columns) {
      exprs.push_back(bind_expr(expr, scope));
      if (!exprs.back().type) {
        throw Error(ErrorCode::TypeError, "apply expression for '" + name + "' is always null");
      }
      out.schema.attributes.push_back(AttributeDesc{name, *exprs.back().type});
    }
    validate_schema(out.schema);
    for (auto& [coords, attrs] : in.cells) {
      const Row row = cell_row(coords, attrs);
      Row extended = attrs;
      for (const auto& e : exprs) {
        Value v = evaluate(e, row);
        if (v.is_null()) {
          throw Error(ErrorCode::TypeError, "apply produced null at " + coords_text(coords));
        }
        extended.push_back(std::move(v));
      }
      out.cells.emplace_hint(out.cells.end(), coords, std::move(extended));
    }
    return out;
  }

  ArrayObject eval(const bql::ArrayCrossJoin& n) const {
    ArrayObject left = (*this)(*n.left);
    ArrayObject right = (*this)(*n.right);
    const auto left_name = n.left_alias ? n.left_alias : base_name(*n.left);
    const auto right_name = n.right_alias ? n.right_alias : base_name(*n.right);

    // Which side a qualified reference names; unqualified refs follow position.
    auto side_of = [&](const bql::DimRef& ref, bool positional_left) {
      if (ref.qualifier.empty()) return positional_left;
      if (left_name && ref.qualifier == *left_name) return true;
      if (right_name && ref.qualifier == *right_name) return false;
      throw Error(ErrorCode::UnknownArray, "cross_join reference to unknown array '" +
                                               ref.qualifier + "'");
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& [a, b] : n.pairs) {
      const bool a_left = side_of(a, true);
      const bool b_left = side_of(b, false);
      if (a_left == b_left) {
        throw Error(ErrorCode::UnknownAttribute,
                    "cross_join pair must name one dimension from each side");
      }
      const auto& l = a_left ? a : b;
      const auto& r = a_left ? b : a;
      pairs.emplace_back(dimension_position(left.schema, l.name),
                         dimension_position(right.schema, r.name));
    }

    ArrayObject out;
    std::set<std::string> taken;
    for (const auto& d : left.schema.dimensions) {
      out.schema.dimensions.push_back(d);
      taken.insert(d.name);
    }
    for (const auto& a : left.schema.attributes) taken.insert(a.name);
    std::vector<std::size_t> free_right;
    for (std::size_t j = 0; j < right.schema.dimensions.size(); ++j) {
      const bool paired = std::any_of(pairs.begin(), pairs.end(),
                                      [&](const auto& p) { return p.second == j; });
      if (paired) continue;
      free_right.push_back(j);
      DimensionDesc d = right.schema.dimensions[j];
      d.name = unique_name(d.name, taken);
      taken.insert(d.name);
      out.schema.dimensions.push_back(std::move(d));
    }
    out.schema.attributes = left.schema.attributes;
    for (const auto& a : right.schema.attributes) {
      AttributeDesc renamed = a;
      renamed.name = unique_name(a.name, taken);
      taken.insert(renamed.name);
      out.schema.attributes.push_back(std::move(renamed));
    }
    validate_schema(out.schema);

    std::map<Coordinates, std::vector<const std::pair<const Coordinates, Row>*>> index;
    for (const auto& cell : right.cells) {
      Coordinates key;
      for (const auto& p : pairs) key.push_back(cell.first[p.second]);
      index[key].push_back(&cell);
    }
    for (const auto& [coords, attrs] : left.cells) {
      Coordinates key;
      for (const auto& p : pairs) key.push_back(coords[p.first]);
      auto it = index.find(key);
      if (it == index.end()) continue;
      for (const auto* cell : it->second) {
        Coordinates c = coords;
        for (auto j : free_right) c.push_back(cell->first[j]);
        Row row = attrs;
        row.insert(row.end(), cell->second.begin(), cell->second.end());
        out.cells.emplace(std::move(c), std::move(row));
      }
    }
    return out;
  }

  ArrayObject eval(const bql::ArrayRedimension& n) const {
    ArrayObject in = (*this)(*n.input);
    ArraySchema target;
    if (const auto* name = std::get_if<std::string>(&n.target)) {
      target = lookup_(*name)->schema;
    } else {
      target = std::get<ArraySchema>(n.target);
    }
    validate_schema(target);
    std::unordered_map<std::string, std::size_t> source;
    const Scope scope = cell_scope(in.schema);
    for (std::size_t i = 0; i < scope.size(); ++i) source.emplace(scope[i].name, i);
    auto lookup_pos = [&](const std::string& name) {
      auto it = source.find(name);
      if (it == source.end()) {
        throw Error(ErrorCode::UnknownAttribute,
                    "redimension target names '" + name + "', absent from the input");
      }
      return it->second;
    };
    std::vector<std::size_t> dim_src;
    std::vector<std::size_t> attr_src;
    for (const auto& d : target.dimensions) dim_src.push_back(lookup_pos(d.name));
    for (const auto& a : target.attributes) attr_src.push_back(lookup_pos(a.name));

    ArrayObject out;
    out.schema = target;
    for (const auto& [coords, attrs] : in.cells) {
      const Row row = cell_row(coords, attrs);
      Coordinates c;
      for (std::size_t i = 0; i < dim_src.size(); ++i) {
        const std::int64_t v = coerce(row[dim_src[i]], ScalarType::Int64).as_int64();
        if (!target.dimensions[i].contains(v)) {
          throw Error(ErrorCode::OutOfBounds, "coordinate " + std::to_string(v) +
                                                  " outside dimension '" +
                                                  target.dimensions[i].name + "'");
        }
        c.push_back(v);
      }
      Row values;
      for (std::size_t i = 0; i < attr_src.size(); ++i) {
        values.push_back(coerce(row[attr_src[i]], target.attributes[i].type));
      }
      if (!out.cells.emplace(c, std::move(values)).second) {
        throw Error(ErrorCode::RedimensionCollision,
                    "two cells map to target coordinate " + coords_text(c));
      }
    }
    return out;
  }

  ArrayObject eval(const bql::ArraySort& n) const {
    ArrayObject in = (*this)(*n.input);
    std::vector<std::size_t> keys;
    for (const auto& a : n.attributes) keys.push_back(attribute_position(in.schema, a));
    if (keys.empty()) {
      keys.resize(in.schema.attributes.size());
      std::iota(keys.begin(), keys.end(), 0);
    }
    std::vector<const Row*> rows;
    for (const auto& [_, attrs] : in.cells) rows.push_back(&attrs);
    std::stable_sort(rows.begin(), rows.end(), [&](const Row* a, const Row* b) {
      for (auto k : keys) {
        auto c = order_values((*a)[k], (*b)[k]);
        if (c != 0) return c < 0;
      }
      return false;
    });
    ArrayObject out;
    out.schema.attributes = in.schema.attributes;
    DimensionDesc n_dim{"n", 0, std::nullopt, 1000000, 0};
    if (!rows.empty()) n_dim.high = static_cast<std::int64_t>(rows.size()) - 1;
    out.schema.dimensions.push_back(n_dim);
    validate_schema(out.schema);
    std::int64_t i = 0;
    for (const Row* r : rows) out.cells.emplace_hint(out.cells.end(), Coordinates{i++}, *r);
    return out;
  }

  const ArrayLookup& lookup_;
};

}  // namespace

ArrayObject evaluate_array(const ArrayExpr& expr, const ArrayLookup& lookup) {
  return Evaluator(lookup)(expr);
}

void validate_schema(const ArraySchema& schema) {
  if (schema.attributes.empty() || schema.dimensions.empty()) {
    throw Error(ErrorCode::SchemaSyntaxError,
                "an array needs at least one attribute and one dimension");
  }
  std::set<std::string> names;
  auto claim = [&](const std::string& name) {
    if (!names.insert(name).second) {
      throw Error(ErrorCode::DuplicateName, "name '" + name + "' used twice in array schema");
    }
  };
  for (const auto& a : schema.attributes) claim(a.name);
  for (const auto& d : schema.dimensions) {
    claim(d.name);
    if ((d.high && d.low > *d.high) || d.chunk <= 0 || d.overlap < 0) {
      throw Error(ErrorCode::BadBounds, "invalid bounds for dimension '" + d.name + "'");
    }
  }
}

Row conform_cell(const ArraySchema& schema, const Coordinates& coords, const Row& attrs) {
  if (coords.size() != schema.dimensions.size()) {
    throw Error(ErrorCode::OutOfBounds, "cell has " + std::to_string(coords.size()) +
                                            " coordinates, array has " +
                                            std::to_string(schema.dimensions.size()) +
                                            " dimensions");
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!schema.dimensions[i].contains(coords[i])) {
      throw Error(ErrorCode::OutOfBounds, "coordinate " + coords_text(coords) +
                                              " outside dimension '" +
                                              schema.dimensions[i].name + "'");
    }
  }
  if (attrs.size() != schema.attributes.size()) {
    throw Error(ErrorCode::TypeError, "cell has " + std::to_string(attrs.size()) +
                                          " attribute values, array has " +
                                          std::to_string(schema.attributes.size()));
  }
  Row out;
  out.reserve(attrs.size());
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].is_null()) {
      throw Error(ErrorCode::TypeError, "arrays cannot hold null (attribute '" +
                                            schema.attributes[i].name + "')");
    }
    out.push_back(coerce(attrs[i], schema.attributes[i].type));
  }
  return out;
}

void ArrayEngine::create_array(const std::string& name, ArraySchema schema) {
  validate_schema(schema);
  ArrayObject a;
  a.schema = std::move(schema);
  arrays_.put(name, std::move(a), false);
}

void ArrayEngine::write_cells(const std::string& name,
                              const std::vector<std::pair<Coordinates, Row>>& cells) {
  count_call();
  arrays_.update(name, [&](ArrayObject& a) {
    for (const auto& [coords, attrs] : cells) {
      a.cells.insert_or_assign(coords, conform_cell(a.schema, coords, attrs));
    }
  });
}

std::shared_ptr<const ArrayObject> ArrayEngine::array(const std::string& name) const {
  return arrays_.get(name);
}

ArrayObject ArrayEngine::evaluate(const ArrayExpr& expr, const Bindings& bindings) const {
  return evaluate_array(expr, [&](const std::string& name) {
    return arrays_.get(physical_name(bindings, name));
  });
}

ResultSet ArrayEngine::execute(const bql::IslandQuery& query, const Bindings& bindings) const {
  count_call();
  const auto* expr = std::get_if<ArrayExpr>(&query.body);
  if (!expr) {
    throw Error(ErrorCode::ShimUnsupported,
                std::string(to_string(query.island())) + " query sent to an array engine");
  }
  return ResultSet{evaluate(*expr, bindings)};
}

ResultSet ArrayEngine::read_object(const std::string& name) const {
  count_call();
  return ResultSet{*arrays_.get(name)};
}

void ArrayEngine::write_object(const std::string& name, ResultSet data, bool replace) {
  count_call();
  auto* array = std::get_if<ArrayObject>(&data.data);
  if (!array) throw Error(ErrorCode::SchemaMismatch, "array engine stores only arrays");
  validate_schema(array->schema);
  for (auto& [coords, attrs] : array->cells) attrs = conform_cell(array->schema, coords, attrs);
  arrays_.put(name, std::move(*array), replace);
}

std::size_t ArrayEngine::object_size(const std::string& name) const {
  return arrays_.get(name)->cells.size();
}

}  // namespace polydawg::engines
