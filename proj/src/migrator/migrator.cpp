#include "polydawg/migrator/migrator.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "polydawg/engines/array.hpp"
#include "polydawg/engines/relational.hpp"
#include "polydawg/error.hpp"

namespace polydawg::migration {

using bql::ArraySchema;
using bql::ColumnDesc;
using bql::Island;
using bql::RelationalSchema;
using bql::TextSchema;

namespace {

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorCode::SchemaMismatch, what); }

std::size_t column_position(const RelationalTable& table, const std::string& name) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i].name == name) return i;
  }
  mismatch("source has no column '" + name + "'");
}

double epoch_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

const std::vector<ColumnDesc> kTextLayout = {{"row", ScalarType::String},
                                             {"colfam", ScalarType::String},
                                             {"colqual", ScalarType::String},
                                             {"ts", ScalarType::Int64},
                                             {"value", ScalarType::String}};

}  // namespace

ArrayObject cast_rel_to_array(const RelationalTable& table, const ArraySchema& schema) {
  engines::validate_schema(schema);
  std::vector<std::size_t> dims;
  for (const auto& d : schema.dimensions) {
    const auto pos = column_position(table, d.name);
    if (!is_integer(table.columns[pos].type)) {
      mismatch("dimension column '" + d.name + "' is not integer-typed");
    }
    dims.push_back(pos);
  }
  std::vector<std::size_t> attrs;
  for (const auto& a : schema.attributes) attrs.push_back(column_position(table, a.name));

  ArrayObject out;
  out.schema = schema;
  for (const auto& row : table.rows) {
    Coordinates coords;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const Value& v = row[dims[i]];
      if (v.is_null()) {
        throw Error(ErrorCode::NullInDimension,
                    "null in dimension column '" + schema.dimensions[i].name + "'");
      }
      const std::int64_t c = v.as_int64();
      if (!schema.dimensions[i].contains(c)) {
        mismatch("coordinate " + std::to_string(c) + " outside dimension '" +
                 schema.dimensions[i].name + "'");
      }
      coords.push_back(c);
    }
    Row values;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      const Value& v = row[attrs[i]];
      if (v.is_null()) {
        throw Error(ErrorCode::TypeError,
                    "null in attribute '" + schema.attributes[i].name + "'; arrays hold no nulls");
      }
      values.push_back(coerce(v, schema.attributes[i].type));
    }
    auto [it, inserted] = out.cells.emplace(std::move(coords), std::move(values));
    if (!inserted) {
      std::string at;
      for (auto c : it->first) at += (at.empty() ? "" : ",") + std::to_string(c);
      throw Error(ErrorCode::CoordinateCollision, "two rows map to coordinate (" + at + ")");
    }
  }
  return out;
}

RelationalTable cast_array_to_rel(const ArrayObject& array, const std::vector<ColumnDesc>& columns) {
  std::vector<ColumnDesc> natural;
  for (const auto& d : array.schema.dimensions) natural.push_back({d.name, ScalarType::Int64});
  for (const auto& a : array.schema.attributes) natural.push_back({a.name, a.type});

  RelationalTable out;
  out.columns = columns.empty() ? natural : columns;
  if (out.columns.size() != natural.size()) {
    mismatch("columns must be exactly the array dimensions and attributes");
  }
  std::vector<std::size_t> source;
  for (const auto& c : out.columns) {
    auto it = std::find_if(natural.begin(), natural.end(),
                           [&](const ColumnDesc& n) { return n.name == c.name; });
    if (it == natural.end()) mismatch("array has no dimension or attribute '" + c.name + "'");
    source.push_back(static_cast<std::size_t>(it - natural.begin()));
  }
  if (std::set<std::size_t>(source.begin(), source.end()).size() != source.size()) {
    mismatch("column list repeats a name");
  }
  const std::size_t ndims = array.schema.dimensions.size();
  for (const auto& [coords, attrs] : array.cells) {
    Row row;
    for (std::size_t i = 0; i < source.size(); ++i) {
      const std::size_t s = source[i];
      const Value v = s < ndims ? Value(coords[s]) : attrs[s - ndims];
      try {
        row.push_back(coerce(v, out.columns[i].type));
      } catch (const Error& e) {
        mismatch(std::string("column '") + out.columns[i].name + "': " + e.what());
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

TextEntries cast_rel_to_text(const RelationalTable& table, const std::string& key_column) {
  std::optional<std::size_t> key;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (table.columns[i].name == key_column) key = i;
  }
  if (!key) throw Error(ErrorCode::UnknownColumn, "no key column '" + key_column + "'");
  TextEntries out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string rowkey = to_text(row[*key]);
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c == *key) continue;
      out.push_back(TextEntry{TextKey{rowkey, "", table.columns[c].name,
                                      static_cast<std::int64_t>(r + 1)},
                              to_text(row[c])});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const TextEntry& a, const TextEntry& b) { return a.key < b.key; });
  return out;
}

RelationalTable cast_text_to_rel(const TextEntries& entries) {
  RelationalTable out;
  out.columns = kTextLayout;
  for (const auto& e : entries) {
    out.rows.push_back({Value(e.key.row), Value(e.key.colfam), Value(e.key.colqual),
                        Value(e.key.timestamp), Value(e.value)});
  }
  return out;
}

bool is_text_layout(const RelationalSchema& schema) {
  if (schema.columns.size() != kTextLayout.size()) return false;
  for (std::size_t i = 0; i < kTextLayout.size(); ++i) {
    if (schema.columns[i].name != kTextLayout[i].name) return false;
  }
  return true;
}

RelationalTable pivot_text_to_rel(const TextEntries& entries, const RelationalSchema& schema) {
  if (schema.columns.empty()) mismatch("pivot needs at least a key column");
  RelationalTable out;
  out.columns = schema.columns;
  auto parse = [&](const std::string& text, const ColumnDesc& c) -> Value {
    if (text.empty() && c.type != ScalarType::String) return Value::null();
    try {
      return parse_value(text, c.type);
    } catch (const Error& e) {
      mismatch("column '" + c.name + "': " + e.what());
    }
  };
  std::vector<std::pair<std::string, std::int64_t>> order;
  std::map<std::pair<std::string, std::int64_t>, Row> groups;
  for (const auto& e : entries) {
    const auto id = std::make_pair(e.key.row, e.key.timestamp);
    auto it = groups.find(id);
    if (it == groups.end()) {
      Row row(schema.columns.size(), Value::null());
      row[0] = parse(e.key.row, schema.columns[0]);
      it = groups.emplace(id, std::move(row)).first;
      order.push_back(id);
    }
    for (std::size_t c = 1; c < schema.columns.size(); ++c) {
      if (schema.columns[c].name == e.key.colqual) it->second[c] = parse(e.value, schema.columns[c]);
    }
  }
  for (const auto& id : order) out.rows.push_back(std::move(groups[id]));
  return out;
}

ResultSet transform(const ResultSet& data, Island to, const std::optional<bql::DestSchema>& schema) {
  const Island from = data.island();
  const auto* rel_schema = schema ? std::get_if<RelationalSchema>(&*schema) : nullptr;
  const auto* array_schema = schema ? std::get_if<ArraySchema>(&*schema) : nullptr;
  const auto* text_schema = schema ? std::get_if<TextSchema>(&*schema) : nullptr;
  if (schema && static_cast<Island>(schema->index()) != to) {
    mismatch("destination schema does not match the " + std::string(to_string(to)) + " island");
  }
  ResultSet out;
  out.engine_id = data.engine_id;
  switch (to) {
    case Island::Relational: {
      if (from == Island::Relational) {
        RelationalTable t = data.table();
        if (rel_schema) {
          if (rel_schema->columns.size() != t.columns.size()) {
            mismatch("destination schema has " + std::to_string(rel_schema->columns.size()) +
                     " columns, source has " + std::to_string(t.columns.size()));
          }
          t.columns = rel_schema->columns;
          try {
            for (auto& row : t.rows) row = engines::conform_row(t.columns, row);
          } catch (const Error& e) {
            mismatch(e.what());
          }
        }
        out.data = std::move(t);
      } else if (from == Island::Array) {
        out.data = cast_array_to_rel(data.array(),
                                     rel_schema ? rel_schema->columns : std::vector<ColumnDesc>{});
      } else if (rel_schema && !is_text_layout(*rel_schema)) {
        out.data = pivot_text_to_rel(data.entries(), *rel_schema);
      } else {
        out.data = cast_text_to_rel(data.entries());
      }
      return out;
    }
    case Island::Array: {
      if (from == Island::Array && (!array_schema || *array_schema == data.array().schema)) {
        out.data = data.array();
        return out;
      }
      if (!array_schema) mismatch("a cast into the array island needs an array schema");
      const ResultSet rel = transform(data, Island::Relational, std::nullopt);
      out.data = cast_rel_to_array(rel.table(), *array_schema);
      return out;
    }
    case Island::Text: break;
  }
  if (from == Island::Text) {
    out.data = data.entries();
    return out;
  }
  const ResultSet rel = transform(data, Island::Relational, std::nullopt);
  const auto& table = rel.table();
  if (table.columns.empty()) mismatch("cannot key an empty column list");
  out.data = cast_rel_to_text(table, text_schema ? text_schema->key_column : table.columns[0].name);
  return out;
}

std::shared_ptr<std::mutex> Migrator::destination_lock(int engine_id, const std::string& name) {
  std::lock_guard lock(locks_mutex_);
  auto& slot = locks_[{engine_id, name}];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

MigrationResult Migrator::migrate(const ConnectionInfo& from, const std::string& object_from,
                                  const ConnectionInfo& to, const std::string& object_to,
                                  const MigrationParams& params, SpanRecorder* spans) {
  return run(nullptr, from, object_from, to, object_to, params, spans);
}

MigrationResult Migrator::migrate_result(const ResultSet& data, const ConnectionInfo& from,
                                         const ConnectionInfo& to, const std::string& object_to,
                                         const MigrationParams& params, SpanRecorder* spans) {
  return run(&data, from, "", to, object_to, params, spans);
}

MigrationResult Migrator::run(const ResultSet* data, const ConnectionInfo& from,
                              const std::string& object_from, const ConnectionInfo& to,
                              const std::string& object_to, const MigrationParams& params,
                              SpanRecorder* spans) {
  MigrationResult result;
  result.start_ms = epoch_ms();
  std::shared_ptr<engines::StorageEngine> src;
  std::shared_ptr<engines::StorageEngine> dst;
  {
    SpanRecorder::Scope span(spans, task::kMigratorDispatch);
    for (const auto* info : {&from, &to}) {
      const auto island = catalog_.island_of(info->engine_id);
      if (!island) {
        throw Error(ErrorCode::ShimUnsupported,
                    "engine " + std::to_string(info->engine_id) + " belongs to no island");
      }
      if (*island != info->kind) {
        throw Error(ErrorCode::InvalidArgument,
                    "engine " + std::to_string(info->engine_id) + " is not a " +
                        std::string(to_string(info->kind)) + " engine");
      }
    }
    if (from.engine_id != to.engine_id && !catalog_.cast_between(from.engine_id, to.engine_id)) {
      throw Error(ErrorCode::NoCastRegistered, "no cast registered from engine " +
                                                   std::to_string(from.engine_id) + " to engine " +
                                                   std::to_string(to.engine_id));
    }
    if (params.schema && static_cast<Island>(params.schema->index()) != to.kind) {
      throw Error(ErrorCode::SchemaMismatch, "destination schema does not match the destination engine");
    }
    src = registry_.get(from.engine_id);
    dst = registry_.get(to.engine_id);
  }

  SpanRecorder::Scope span(spans, task::kMigration);
  ResultSet extracted;
  if (data) {
    extracted = *data;
  } else {
    try {
      extracted = src->read_object(object_from);
    } catch (const Error& e) {
      throw MigrationException(MigrationPhase::Extract, e.code(), e.what());
    }
  }
  result.count_extracted = extracted.cardinality();

  ResultSet translated;
  try {
    translated = transform(extracted, to.kind, params.schema);
  } catch (const Error& e) {
    throw MigrationException(MigrationPhase::Transform, e.code(), e.what());
  }

  auto lock = destination_lock(to.engine_id, object_to);
  std::lock_guard guard(*lock);
  bool written = false;
  try {
    if (dst->has_object(object_to)) {
      if (!params.drop_if_exists) {
        throw Error(ErrorCode::Duplicate, "destination '" + object_to + "' already exists");
      }
      dst->drop_object(object_to);
    }
    written = true;
    dst->write_object(object_to, std::move(translated), false);
    result.count_loaded = dst->object_size(object_to);
  } catch (const Error& e) {
    if (written) dst->drop_object(object_to);
    throw MigrationException(MigrationPhase::Load, e.code(), e.what());
  }
  result.end_ms = std::max(result.start_ms, epoch_ms());
  return result;
}

}  // namespace polydawg::migration
