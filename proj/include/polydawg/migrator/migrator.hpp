#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "polydawg/bql/ast.hpp"
#include "polydawg/catalog/catalog.hpp"
#include "polydawg/engines/data.hpp"
#include "polydawg/executor/spans.hpp"
#include "polydawg/island/island.hpp"

namespace polydawg::migration {

struct ConnectionInfo {
  bql::Island kind = bql::Island::Relational;
  int engine_id = 0;
  std::string database;
};

struct MigrationParams {
  std::string dest_name;
  std::optional<bql::DestSchema> schema;
  bool drop_if_exists = true;
};

enum class MigrationStatus { Ok, Failed };

struct MigrationResult {
  std::size_t count_extracted = 0;
  std::size_t count_loaded = 0;
  double start_ms = 0;  // wall clock, ms since epoch
  double end_ms = 0;
  MigrationStatus status = MigrationStatus::Ok;
};

/// Each row becomes one cell: columns named like dimensions give coordinates,
/// columns named like attributes give attribute values.
ArrayObject cast_rel_to_array(const RelationalTable& table, const bql::ArraySchema& schema);

/// One row per cell. `columns` must name exactly the dimensions and
/// attributes; empty means dimensions then attributes with their own types.
RelationalTable cast_array_to_rel(const ArrayObject& array,
                                  const std::vector<bql::ColumnDesc>& columns = {});

/// Row key is the key column's value; one entry per non-key column with an
/// empty column family and the column name as qualifier. All entries of one
/// source row share timestamp = row position + 1. Nulls become empty values.
TextEntries cast_rel_to_text(const RelationalTable& table, const std::string& key_column);

/// Fixed layout (row, colfam, colqual, ts, value).
RelationalTable cast_text_to_rel(const TextEntries& entries);

/// Inverse of cast_rel_to_text: the first column of `schema` receives the row
/// key, the others the values stored under their names. Entries are grouped
/// by (row, timestamp); empty values in non-string columns become null.
RelationalTable pivot_text_to_rel(const TextEntries& entries, const bql::RelationalSchema& schema);

/// True when `schema` is the fixed text layout of cast_text_to_rel.
bool is_text_layout(const bql::RelationalSchema& schema);

/// Converts `data` to the destination model. Same-model moves copy values
/// directly, conforming to `schema` when one is given.
ResultSet transform(const ResultSet& data, bql::Island to,
                    const std::optional<bql::DestSchema>& schema);

/// Moves objects between engines. Requires a registered cast for distinct
/// engines; a move within one engine needs none.
class Migrator {
 public:
  Migrator(const catalog::Catalog& catalog, island::EngineRegistry& registry)
      : catalog_(catalog), registry_(registry) {}

  MigrationResult migrate(const ConnectionInfo& from, const std::string& object_from,
                          const ConnectionInfo& to, const std::string& object_to,
                          const MigrationParams& params, SpanRecorder* spans = nullptr);

  /// As migrate, with an already extracted result as the source.
  MigrationResult migrate_result(const ResultSet& data, const ConnectionInfo& from,
                                 const ConnectionInfo& to, const std::string& object_to,
                                 const MigrationParams& params, SpanRecorder* spans = nullptr);

 private:
  MigrationResult run(const ResultSet* data, const ConnectionInfo& from,
                      const std::string& object_from, const ConnectionInfo& to,
                      const std::string& object_to, const MigrationParams& params,
                      SpanRecorder* spans);
  std::shared_ptr<std::mutex> destination_lock(int engine_id, const std::string& name);

  const catalog::Catalog& catalog_;
  island::EngineRegistry& registry_;
  std::mutex locks_mutex_;
  std::map<std::pair<int, std::string>, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace polydawg::migration
