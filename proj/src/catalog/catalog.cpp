#include "polydawg/catalog/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "polydawg/error.hpp"
#include "polydawg/text_util.hpp"

namespace polydawg::catalog {

using bql::ColumnDesc;
using bql::Island;

namespace {

const char* const kTables[] = {"engines", "databases", "objects", "shims", "casts"};
constexpr std::string_view kSectionPrefix = "#table:";
constexpr std::string_view kEndMarker = "#end";

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::CorruptCatalog, "corrupt catalog: " + what);
}

int parse_int(const std::string& s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) corrupt("bad integer '" + s + "'");
  return v;
}

std::string field_list(const std::vector<std::string>& fields) { return join(fields, ","); }

std::string line_of(const std::vector<std::string>& cells) {
  std::vector<std::string> escaped;
  for (const auto& c : cells) escaped.push_back(escape_tsv(c));
  return join(escaped, "\t");
}

std::vector<std::vector<std::string>> rows_of(const Snapshot& s, const std::string& table) {
  std::vector<std::vector<std::string>> out;
  if (table == "engines") {
    for (const auto& e : s.engines) {
      out.push_back({std::to_string(e.engine_id), e.name, e.host, std::to_string(e.port),
                     e.connection_properties});
    }
  } else if (table == "databases") {
    for (const auto& d : s.databases) {
      out.push_back({std::to_string(d.database_id), std::to_string(d.engine_id), d.name, d.userid,
                     d.password});
    }
  } else if (table == "objects") {
    for (const auto& o : s.objects) {
      out.push_back({std::to_string(o.object_id), o.name, field_list(o.fields),
                     std::to_string(o.logical_database), std::to_string(o.physical_database)});
    }
  } else if (table == "shims") {
    for (const auto& sh : s.shims) {
      out.push_back({std::to_string(sh.shim_id), std::string(to_string(sh.island)),
                     std::to_string(sh.engine_id)});
    }
  } else {
    for (const auto& c : s.casts) {
      out.push_back({std::to_string(c.cast_id), std::to_string(c.src_engine_id),
                     std::to_string(c.dst_engine_id), c.access_method});
    }
  }
  return out;
}

void add_row(Snapshot& s, const std::string& table, const std::vector<std::string>& r) {
  if (r.size() != catalog_columns(table).size()) corrupt("wrong field count in " + table);
  if (table == "engines") {
    s.engines.push_back({parse_int(r[0]), r[1], r[2], parse_int(r[3]), r[4]});
  } else if (table == "databases") {
    s.databases.push_back({parse_int(r[0]), parse_int(r[1]), r[2], r[3], r[4]});
  } else if (table == "objects") {
    s.objects.push_back({parse_int(r[0]), r[1], split(r[2], ','), parse_int(r[3]), parse_int(r[4])});
  } else if (table == "shims") {
    auto island = bql::parse_island(r[1]);
    if (!island) corrupt("unknown island '" + r[1] + "'");
    s.shims.push_back({parse_int(r[0]), *island, parse_int(r[2])});
  } else {
    s.casts.push_back({parse_int(r[0]), parse_int(r[1]), parse_int(r[2]), r[3]});
  }
}

template <typename T, typename Fn>
bool any_of(const std::vector<T>& v, Fn fn) {
  return std::any_of(v.begin(), v.end(), fn);
}

template <typename T, typename Fn>
std::optional<T> find_if(const std::vector<T>& v, Fn fn) {
  auto it = std::find_if(v.begin(), v.end(), fn);
  if (it == v.end()) return std::nullopt;
  return *it;
}

void require_name(const std::string& what, const std::string& name) {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, what + " name must not be empty");
}

}  // namespace

const std::vector<ColumnDesc>& catalog_columns(const std::string& table) {
  using bql::ColumnDesc;
  static const std::vector<ColumnDesc> engines = {{"engine_id", ScalarType::Int32},
                                                  {"name", ScalarType::String},
                                                  {"host", ScalarType::String},
                                                  {"port", ScalarType::Int32},
                                                  {"connection_properties", ScalarType::String}};
  static const std::vector<ColumnDesc> databases = {{"database_id", ScalarType::Int32},
                                                    {"engine_id", ScalarType::Int32},
                                                    {"name", ScalarType::String},
                                                    {"userid", ScalarType::String},
                                                    {"password", ScalarType::String}};
  static const std::vector<ColumnDesc> objects = {{"object_id", ScalarType::Int32},
                                                  {"name", ScalarType::String},
                                                  {"fields", ScalarType::String},
                                                  {"logical_database", ScalarType::Int32},
                                                  {"physical_database", ScalarType::Int32}};
  static const std::vector<ColumnDesc> shims = {{"shim_id", ScalarType::Int32},
                                                {"island", ScalarType::String},
                                                {"engine_id", ScalarType::Int32}};
  static const std::vector<ColumnDesc> casts = {{"cast_id", ScalarType::Int32},
                                                {"src_engine_id", ScalarType::Int32},
                                                {"dst_engine_id", ScalarType::Int32},
                                                {"access_method", ScalarType::String}};
  if (table == "engines") return engines;
  if (table == "databases") return databases;
  if (table == "objects") return objects;
  if (table == "shims") return shims;
  if (table == "casts") return casts;
  throw Error(ErrorCode::UnknownCatalogTable, "unknown catalog table '" + table + "'");
}

int Catalog::register_engine(const std::string& name, const std::string& host, int port,
                             const std::string& props) {
  require_name("engine", name);
  if (port < 1 || port > 65535) {
    throw Error(ErrorCode::InvalidPort, "port " + std::to_string(port) + " outside 1..65535");
  }
  std::unique_lock lock(mutex_);
  if (any_of(s_.engines, [&](const EngineRecord& e) { return e.name == name; })) {
    throw Error(ErrorCode::DuplicateName, "engine '" + name + "' already registered");
  }
  const int id = static_cast<int>(s_.engines.size());
  s_.engines.push_back({id, name, host, port, props});
  return id;
}

int Catalog::register_database(int engine_id, const std::string& name, const std::string& userid,
                               const std::string& password) {
  require_name("database", name);
  std::unique_lock lock(mutex_);
  if (!any_of(s_.engines, [&](const EngineRecord& e) { return e.engine_id == engine_id; })) {
    throw Error(ErrorCode::UnknownEngine, "no engine with id " + std::to_string(engine_id));
  }
  if (any_of(s_.databases, [&](const DatabaseRecord& d) {
        return d.engine_id == engine_id && d.name == name;
      })) {
    throw Error(ErrorCode::Duplicate, "database '" + name + "' already exists on engine " +
                                          std::to_string(engine_id));
  }
  const int id = static_cast<int>(s_.databases.size());
  s_.databases.push_back({id, engine_id, name, userid, password});
  return id;
}

int Catalog::register_object(const std::string& name, const std::vector<std::string>& fields,
                             int logical_db, int physical_db) {
  require_name("object", name);
  if (fields.empty()) throw Error(ErrorCode::InvalidArgument, "object '" + name + "' has no fields");
  for (const auto& f : fields) {
    if (f.empty() || f.find(',') != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "invalid field name '" + f + "'");
    }
  }
  std::unique_lock lock(mutex_);
  for (int db : {logical_db, physical_db}) {
    if (!any_of(s_.databases, [&](const DatabaseRecord& d) { return d.database_id == db; })) {
      throw Error(ErrorCode::UnknownDatabase, "no database with id " + std::to_string(db));
    }
  }
  if (any_of(s_.objects, [&](const ObjectRecord& o) {
        return o.name == name && o.logical_database == logical_db;
      })) {
    throw Error(ErrorCode::Duplicate, "object '" + name + "' already exists in database " +
                                          std::to_string(logical_db));
  }
  const int id = static_cast<int>(s_.objects.size());
  s_.objects.push_back({id, name, fields, logical_db, physical_db});
  return id;
}

int Catalog::register_shim(Island island, int engine_id) {
  std::unique_lock lock(mutex_);
  if (!any_of(s_.engines, [&](const EngineRecord& e) { return e.engine_id == engine_id; })) {
    throw Error(ErrorCode::UnknownEngine, "no engine with id " + std::to_string(engine_id));
  }
  if (any_of(s_.shims, [&](const ShimRecord& s) {
        return s.island == island && s.engine_id == engine_id;
      })) {
    throw Error(ErrorCode::Duplicate, "shim already registered");
  }
  const int id = static_cast<int>(s_.shims.size());
  s_.shims.push_back({id, island, engine_id});
  return id;
}

int Catalog::register_cast(int src_engine_id, int dst_engine_id, const std::string& access_method) {
  if (src_engine_id == dst_engine_id) {
    throw Error(ErrorCode::InvalidArgument, "cast source and destination must differ");
  }
  std::unique_lock lock(mutex_);
  for (int id : {src_engine_id, dst_engine_id}) {
    if (!any_of(s_.engines, [&](const EngineRecord& e) { return e.engine_id == id; })) {
      throw Error(ErrorCode::UnknownEngine, "no engine with id " + std::to_string(id));
    }
  }
  if (any_of(s_.casts, [&](const CastRecord& c) {
        return c.src_engine_id == src_engine_id && c.dst_engine_id == dst_engine_id;
      })) {
    throw Error(ErrorCode::Duplicate, "cast already registered");
  }
  const int id = static_cast<int>(s_.casts.size());
  s_.casts.push_back({id, src_engine_id, dst_engine_id, access_method});
  return id;
}

Placement Catalog::placement_locked(const ObjectRecord& object) const {
  auto db = find_if(s_.databases, [&](const DatabaseRecord& d) {
    return d.database_id == object.physical_database;
  });
  if (!db) throw Error(ErrorCode::UnknownDatabase, "object '" + object.name + "' has no database");
  auto engine = find_if(s_.engines, [&](const EngineRecord& e) { return e.engine_id == db->engine_id; });
  if (!engine) throw Error(ErrorCode::UnknownEngine, "database '" + db->name + "' has no engine");
  auto shim = find_if(s_.shims, [&](const ShimRecord& s) { return s.engine_id == engine->engine_id; });
  if (!shim) {
    throw Error(ErrorCode::NoShim, "engine '" + engine->name + "' is not attached to any island");
  }
  return Placement{object, *db, *engine, shim->island};
}

Placement Catalog::resolve_object(const std::string& name) const {
  std::shared_lock lock(mutex_);
  for (const auto& o : s_.objects) {
    if (o.name == name) return placement_locked(o);
  }
  throw Error(ErrorCode::UnknownObject, "unknown object '" + name + "'");
}

std::vector<Placement> Catalog::placements(const std::string& name) const {
  std::shared_lock lock(mutex_);
  std::vector<Placement> out;
  for (const auto& o : s_.objects) {
    if (o.name != name) continue;
    try {
      out.push_back(placement_locked(o));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoShim) throw;
    }
  }
  return out;
}

std::optional<EngineRecord> Catalog::engine(int engine_id) const {
  std::shared_lock lock(mutex_);
  return find_if(s_.engines, [&](const EngineRecord& e) { return e.engine_id == engine_id; });
}

std::optional<EngineRecord> Catalog::engine_by_name(const std::string& name) const {
  std::shared_lock lock(mutex_);
  return find_if(s_.engines, [&](const EngineRecord& e) { return e.name == name; });
}

std::optional<DatabaseRecord> Catalog::database(int database_id) const {
  std::shared_lock lock(mutex_);
  return find_if(s_.databases, [&](const DatabaseRecord& d) { return d.database_id == database_id; });
}

std::optional<DatabaseRecord> Catalog::database_by_name(const std::string& name) const {
  std::shared_lock lock(mutex_);
  return find_if(s_.databases, [&](const DatabaseRecord& d) { return d.name == name; });
}

std::optional<Island> Catalog::island_of(int engine_id) const {
  std::shared_lock lock(mutex_);
  auto shim = find_if(s_.shims, [&](const ShimRecord& s) { return s.engine_id == engine_id; });
  if (!shim) return std::nullopt;
  return shim->island;
}

std::vector<int> Catalog::island_engines(Island island) const {
  std::shared_lock lock(mutex_);
  std::vector<int> out;
  for (const auto& s : s_.shims) {
    if (s.island == island) out.push_back(s.engine_id);
  }
  return out;
}

std::optional<CastRecord> Catalog::cast_between(int src_engine_id, int dst_engine_id) const {
  std::shared_lock lock(mutex_);
  return find_if(s_.casts, [&](const CastRecord& c) {
    return c.src_engine_id == src_engine_id && c.dst_engine_id == dst_engine_id;
  });
}

Snapshot Catalog::snapshot() const {
  std::shared_lock lock(mutex_);
  return s_;
}

bool Catalog::empty() const {
  std::shared_lock lock(mutex_);
  return s_ == Snapshot{};
}

RelationalTable Catalog::query(const bql::CatalogQuery& q) const {
  const auto& all = catalog_columns(q.table);
  auto index_of = [&](const std::string& column) {
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].name == column) return i;
    }
    throw Error(ErrorCode::UnknownColumn,
                "catalog table '" + q.table + "' has no column '" + column + "'");
  };
  std::vector<std::size_t> picked;
  for (const auto& c : q.columns) picked.push_back(index_of(c));
  if (picked.empty()) {
    for (std::size_t i = 0; i < all.size(); ++i) picked.push_back(i);
  }
  std::optional<std::size_t> filter_column;
  if (q.filter) filter_column = index_of(q.filter->column);

  RelationalTable out;
  for (auto i : picked) out.columns.push_back(all[i]);
  const Snapshot snap = snapshot();
  for (const auto& raw : rows_of(snap, q.table)) {
    Row row;
    for (std::size_t i = 0; i < all.size(); ++i) {
      row.push_back(all[i].type == ScalarType::Int32 ? Value(parse_int(raw[i])) : Value(raw[i]));
    }
    if (filter_column) {
      const Value& v = row[*filter_column];
      if (q.filter->value.is_null() || !same_value(v, q.filter->value)) continue;
    }
    Row projected;
    for (auto i : picked) projected.push_back(row[i]);
    out.rows.push_back(std::move(projected));
  }
  return out;
}

std::vector<std::string> Catalog::integrity_violations() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  auto engine_ok = [&](int id) {
    return any_of(s_.engines, [&](const EngineRecord& e) { return e.engine_id == id; });
  };
  auto db_ok = [&](int id) {
    return any_of(s_.databases, [&](const DatabaseRecord& d) { return d.database_id == id; });
  };
  std::set<std::string> names;
  for (std::size_t i = 0; i < s_.engines.size(); ++i) {
    const auto& e = s_.engines[i];
    if (e.engine_id != static_cast<int>(i)) out.push_back("engine id out of sequence: " + e.name);
    if (e.name.empty() || !names.insert(e.name).second) out.push_back("bad engine name: " + e.name);
    if (e.port < 1 || e.port > 65535) out.push_back("bad port on engine " + e.name);
  }
  for (const auto& d : s_.databases) {
    if (!engine_ok(d.engine_id)) out.push_back("database " + d.name + " has dangling engine");
  }
  std::set<std::pair<std::string, int>> placed;
  for (const auto& o : s_.objects) {
    if (!db_ok(o.logical_database) || !db_ok(o.physical_database)) {
      out.push_back("object " + o.name + " has dangling database");
    }
    if (o.fields.empty()) out.push_back("object " + o.name + " has no fields");
    if (!placed.insert({o.name, o.logical_database}).second) {
      out.push_back("object " + o.name + " placed twice in one logical database");
    }
  }
  for (const auto& s : s_.shims) {
    if (!engine_ok(s.engine_id)) out.push_back("shim " + std::to_string(s.shim_id) + " dangling");
  }
  for (const auto& c : s_.casts) {
    if (!engine_ok(c.src_engine_id) || !engine_ok(c.dst_engine_id) ||
        c.src_engine_id == c.dst_engine_id) {
      out.push_back("cast " + std::to_string(c.cast_id) + " invalid");
    }
  }
  return out;
}

std::string Catalog::serialize(const std::vector<Section>& extra) const {
  const Snapshot snap = snapshot();
  std::string out;
  for (const char* table : kTables) {
    out += std::string(kSectionPrefix) + table + "\n";
    std::vector<std::string> header;
    for (const auto& c : catalog_columns(table)) header.push_back(c.name);
    out += join(header, "\t") + "\n";
    for (const auto& row : rows_of(snap, table)) out += line_of(row) + "\n";
  }
  for (const auto& section : extra) {
    out += std::string(kSectionPrefix) + section.name + "\n";
    for (const auto& line : section.lines) out += line + "\n";
  }
  out += std::string(kEndMarker) + "\n";
  return out;
}

std::vector<Section> Catalog::deserialize(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  if (lines.empty() || lines.back() != "") corrupt("missing final newline");
  lines.pop_back();
  if (lines.empty() || lines.back() != kEndMarker) corrupt("missing end marker");
  lines.pop_back();

  Snapshot snap;
  std::vector<Section> extra;
  std::set<std::string> seen;
  std::string current;
  bool expect_header = false;
  for (const auto& line : lines) {
    if (line.rfind(kSectionPrefix, 0) == 0) {
      current = line.substr(kSectionPrefix.size());
      if (current.empty() || !seen.insert(current).second) corrupt("bad section '" + current + "'");
      const bool known = std::find(std::begin(kTables), std::end(kTables), current) != std::end(kTables);
      if (!known) extra.push_back({current, {}});
      expect_header = known;
      continue;
    }
    if (current.empty()) corrupt("data before first section");
    const bool known = std::find(std::begin(kTables), std::end(kTables), current) != std::end(kTables);
    if (!known) {
      extra.back().lines.push_back(line);
      continue;
    }
    std::vector<std::string> cells = split(line, '\t');
    if (expect_header) {
      std::vector<std::string> want;
      for (const auto& c : catalog_columns(current)) want.push_back(c.name);
      if (cells != want) corrupt("unexpected header in " + current);
      expect_header = false;
      continue;
    }
    for (auto& c : cells) {
      std::string raw;
      if (!unescape_tsv(c, raw)) corrupt("bad escape in " + current);
      c = std::move(raw);
    }
    add_row(snap, current, cells);
  }
  for (const char* table : kTables) {
    if (!seen.count(table)) corrupt(std::string("missing section ") + table);
  }
  if (expect_header) corrupt("section without header");

  std::unique_lock lock(mutex_);
  s_ = std::move(snap);
  return extra;
}

void Catalog::persist(const std::string& path, const std::vector<Section>& extra) const {
  const std::string text = serialize(extra);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write '" + tmp + "'");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorCode::IoFailure, "cannot replace '" + path + "'");
  }
}

std::vector<Section> Catalog::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read of '" + path + "' failed");
  return deserialize(buf.str());
}

}  // namespace polydawg::catalog
