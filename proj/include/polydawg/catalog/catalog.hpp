#pragma once

#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/engines/data.hpp"

namespace polydawg::catalog {

struct EngineRecord {
  int engine_id = 0;
  std::string name;
  std::string host;
  int port = 0;
  std::string connection_properties;
  bool operator==(const EngineRecord&) const = default;
};

struct DatabaseRecord {
  int database_id = 0;
  int engine_id = 0;
  std::string name;
  std::string userid;
  std::string password;
  bool operator==(const DatabaseRecord&) const = default;
};

struct ObjectRecord {
  int object_id = 0;
  std::string name;
  std::vector<std::string> fields;
  int logical_database = 0;
  int physical_database = 0;
  bool operator==(const ObjectRecord&) const = default;
};

struct ShimRecord {
  int shim_id = 0;
  bql::Island island = bql::Island::Relational;
  int engine_id = 0;
  bool operator==(const ShimRecord&) const = default;
};

struct CastRecord {
  int cast_id = 0;
  int src_engine_id = 0;
  int dst_engine_id = 0;
  std::string access_method;
  bool operator==(const CastRecord&) const = default;
};

/// Full placement chain of one object.
struct Placement {
  ObjectRecord object;
  DatabaseRecord database;
  EngineRecord engine;
  bql::Island island = bql::Island::Relational;
};

/// A non-catalog section carried in the persistence file (e.g. monitor state).
struct Section {
  std::string name;
  std::vector<std::string> lines;
};

struct Snapshot {
  std::vector<EngineRecord> engines;
  std::vector<DatabaseRecord> databases;
  std::vector<ObjectRecord> objects;
  std::vector<ShimRecord> shims;
  std::vector<CastRecord> casts;
  bool operator==(const Snapshot&) const = default;
};

/// In-memory catalog of engines, databases, objects, shims and casts.
/// Ids are assigned sequentially from 0 per table. Readers run concurrently;
/// writers are serialized.
class Catalog {
 public:
  Catalog() = default;
  Catalog(const Catalog&) = delete;
  Catalog& operator=(const Catalog&) = delete;

  int register_engine(const std::string& name, const std::string& host, int port,
                      const std::string& props);
  int register_database(int engine_id, const std::string& name, const std::string& userid,
                        const std::string& password);
  int register_object(const std::string& name, const std::vector<std::string>& fields,
                      int logical_db, int physical_db);
  int register_shim(bql::Island island, int engine_id);
  int register_cast(int src_engine_id, int dst_engine_id, const std::string& access_method);

  /// First placement (lowest object id) of `name`.
  Placement resolve_object(const std::string& name) const;
  /// Every placement of `name`, in object id order; empty when unknown.
  /// Objects whose engine has no shim are skipped.
  std::vector<Placement> placements(const std::string& name) const;

  std::optional<EngineRecord> engine(int engine_id) const;
  std::optional<EngineRecord> engine_by_name(const std::string& name) const;
  std::optional<DatabaseRecord> database(int database_id) const;
  std::optional<DatabaseRecord> database_by_name(const std::string& name) const;
  std::optional<bql::Island> island_of(int engine_id) const;
  /// Engines with a shim for `island`, in shim id order.
  std::vector<int> island_engines(bql::Island island) const;
  std::optional<CastRecord> cast_between(int src_engine_id, int dst_engine_id) const;

  Snapshot snapshot() const;
  bool empty() const;

  /// bdcatalog(table [, columns]) with optional `column = literal` filter.
  RelationalTable query(const bql::CatalogQuery& query) const;

  /// Referential-integrity violations found by a full scan; empty when sound.
  std::vector<std::string> integrity_violations() const;

  /// Writes the catalog tables followed by `extra` sections and an end marker.
  void persist(const std::string& path, const std::vector<Section>& extra = {}) const;
  /// Replaces the contents with the file at `path`. Returns its extra sections.
  std::vector<Section> load(const std::string& path);

  std::string serialize(const std::vector<Section>& extra = {}) const;
  std::vector<Section> deserialize(const std::string& text);

 private:
  Placement placement_locked(const ObjectRecord& object) const;

  mutable std::shared_mutex mutex_;
  Snapshot s_;
};

/// Column names of each catalog table, in output order.
const std::vector<bql::ColumnDesc>& catalog_columns(const std::string& table);

}  // namespace polydawg::catalog
