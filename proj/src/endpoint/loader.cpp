#include "polydawg/endpoint/loader.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

#include "polydawg/error.hpp"

namespace polydawg::endpoint {

using bql::Island;

namespace {

constexpr const char* kPatients = "mimic2v26.d_patients";
constexpr const char* kOrders = "mimic2v26.poe_order";
constexpr const char* kArray = "myarray";
constexpr const char* kLogs = "mimic_logs";

constexpr int kPatientCount = 120;
constexpr int kOrderCount = 1200;
constexpr int kArrayExtent = 300;
constexpr int kLogRows = 200;

struct Demo {
  RelationalTable patients;
  RelationalTable orders;
  ArrayObject array;
  TextEntries logs;
};

std::vector<std::string> names_of(const std::vector<bql::ColumnDesc>& columns) {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

Demo generate(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Demo d;

  using bql::ColumnDesc;
  d.patients.columns = {ColumnDesc{"subject_id", ScalarType::Int32},
                        ColumnDesc{"sex", ScalarType::String},
                        ColumnDesc{"dob", ScalarType::String},
                        ColumnDesc{"dod", ScalarType::String},
                        ColumnDesc{"hospital_expire_flg", ScalarType::String}};
  for (int i = 1; i <= kPatientCount; ++i) {
    const bool died = pick(0, 3) == 0;
    const int year = pick(2500, 2700);
    d.patients.rows.push_back(
        {Value(std::int32_t{i}), Value(pick(0, 1) ? "M" : "F"),
         Value(fmt::format("{}-{:02}-{:02}", year, pick(1, 12), pick(1, 28))),
         died ? Value(fmt::format("{}-{:02}-{:02}", year + pick(40, 90), pick(1, 12), pick(1, 28)))
              : Value::null(),
         Value(died ? "Y" : "N")});
  }

  static const char* kMedications[] = {"Heparin",    "Insulin", "Furosemide", "Metoprolol",
                                       "Vancomycin", "Morphine", "Potassium",  "Pantoprazole"};
  static const char* kRoutes[] = {"IV", "PO", "SC", "IM"};
  d.orders.columns = {ColumnDesc{"poe_id", ScalarType::Int32},
                      ColumnDesc{"subject_id", ScalarType::Int32},
                      ColumnDesc{"medication", ScalarType::String},
                      ColumnDesc{"route", ScalarType::String},
                      ColumnDesc{"dose_val", ScalarType::Double}};
  for (int i = 1; i <= kOrderCount; ++i) {
    d.orders.rows.push_back({Value(std::int32_t{1000 + i}), Value(std::int32_t{pick(1, kPatientCount)}),
                             Value(kMedications[pick(0, 7)]), Value(kRoutes[pick(0, 3)]),
                             Value(pick(1, 400) / 4.0)});
  }

  d.array.schema.attributes = {bql::AttributeDesc{"val", ScalarType::Double},
                               bql::AttributeDesc{"flag", ScalarType::Int32}};
  d.array.schema.dimensions = {bql::DimensionDesc{"dim1", 0, kArrayExtent - 1, 100, 0},
                               bql::DimensionDesc{"dim2", 0, 1, 2, 0}};
  std::normal_distribution<double> wave(0.0, 1.0);
  for (std::int64_t i = 0; i < kArrayExtent; ++i) {
    for (std::int64_t j = 0; j < 2; ++j) {
      const double v = std::round((std::sin(i / 10.0 + j) + 0.1 * wave(rng)) * 1000.0) / 1000.0;
      d.array.cells[{i, j}] = {Value(v), Value(std::int32_t{pick(0, 1)})};
    }
  }

  static const char* kEvents[] = {"admit", "transfer", "alarm", "note", "discharge"};
  for (int r = 1; r <= kLogRows; ++r) {
    const std::string row = fmt::format("r_{:04}", r);
    const std::int64_t ts = 1000 + r;
    d.logs.push_back({TextKey{row, "log", "event", ts}, kEvents[pick(0, 4)]});
    d.logs.push_back(
        {TextKey{row, "log", "text", ts},
         fmt::format("patient {} {} reading {}", pick(1, kPatientCount), kEvents[pick(0, 4)],
                     pick(40, 180))});
  }
  return d;
}

int engine_id(const catalog::Catalog& catalog, const std::string& name) {
  auto e = catalog.engine_by_name(name);
  if (!e) throw Error(ErrorCode::UnknownEngine, "demo engine '" + name + "' is not registered");
  return e->engine_id;
}

void register_demo(catalog::Catalog& c, const Demo& d) {
  const int pg0 = c.register_engine("postgres0", "localhost", 5431, "role=catalog");
  const int pg1 = c.register_engine("postgres1", "localhost", 5432, "role=data");
  const int scidb = c.register_engine("scidb", "localhost", 1239, "");
  const int accumulo = c.register_engine("accumulo", "localhost", 42424, "instance=bigdawg");
  c.register_database(pg0, "bigdawg_catalog", "postgres", "test");
  const int rel = c.register_database(pg1, "mimic2v26", "postgres", "test");
  const int arr = c.register_database(scidb, "mimic2v26_array", "scidb", "");
  const int txt = c.register_database(accumulo, "mimic2v26_text", "root", "secret");
  c.register_shim(Island::Relational, pg1);
  c.register_shim(Island::Array, scidb);
  c.register_shim(Island::Text, accumulo);
  for (int a : {pg1, scidb, accumulo}) {
    for (int b : {pg1, scidb, accumulo}) {
      if (a != b) c.register_cast(a, b, "csv");
    }
  }
  c.register_object(kPatients, names_of(d.patients.columns), rel, rel);
  c.register_object(kOrders, names_of(d.orders.columns), rel, rel);
  std::vector<std::string> array_fields;
  for (const auto& dim : d.array.schema.dimensions) array_fields.push_back(dim.name);
  for (const auto& at : d.array.schema.attributes) array_fields.push_back(at.name);
  c.register_object(kArray, array_fields, arr, arr);
  c.register_object(kLogs, {"row", "cf", "cq", "ts", "value"}, txt, txt);
}

}  // namespace

LoadSummary load_demo_dataset(Polystore& store, bool force, std::uint64_t seed) {
  const Demo d = generate(seed);
  LoadSummary out;
  auto& catalog = store.catalog();
  if (!catalog.engine_by_name("postgres1")) {
    register_demo(catalog, d);
    out.registered = true;
  }
  store.attach_engines();
  auto& registry = store.registry();
  const int pg1 = engine_id(catalog, "postgres1");
  const int scidb = engine_id(catalog, "scidb");
  const int accumulo = engine_id(catalog, "accumulo");
  if (!force && registry.get(pg1)->has_object(kPatients)) {
    throw Error(ErrorCode::AlreadyLoaded, "demo dataset is already loaded");
  }
  auto put = [&](int engine, const std::string& name, ResultSet data) {
    out.objects[name] = data.cardinality();
    registry.get(engine)->write_object(name, std::move(data), true);
  };
  put(pg1, kPatients, ResultSet{d.patients});
  put(pg1, kOrders, ResultSet{d.orders});
  const auto snap = catalog.snapshot();
  for (const auto& o : snap.objects) {
    if (o.name != kPatients && o.name != kOrders) continue;
    for (const auto& db : snap.databases) {
      if (db.database_id != o.physical_database || db.engine_id == pg1) continue;
      if (!registry.contains(db.engine_id)) continue;
      registry.get(db.engine_id)
          ->write_object(o.name, ResultSet{o.name == kPatients ? d.patients : d.orders}, true);
    }
  }
  put(scidb, kArray, ResultSet{d.array});
  put(accumulo, kLogs, ResultSet{d.logs});
  return out;
}

int add_relational_replica(Polystore& store, const std::string& engine_name) {
  auto& c = store.catalog();
  const int source = engine_id(c, "postgres1");
  const int id = c.register_engine(engine_name, "localhost", 5433 + static_cast<int>(c.snapshot().engines.size()),
                                   "role=replica");
  const int db = c.register_database(id, "mimic2v26_" + engine_name, "postgres", "test");
  const auto peers = c.snapshot().shims;
  c.register_shim(Island::Relational, id);
  for (const auto& shim : peers) {
    c.register_cast(shim.engine_id, id, "csv");
    c.register_cast(id, shim.engine_id, "csv");
  }
  store.attach_engines();
  auto src = store.registry().get(source);
  auto dst = store.registry().get(id);
  for (const char* name : {kPatients, kOrders}) {
    ResultSet data = src->read_object(name);
    c.register_object(name, names_of(data.table().columns), db, db);
    dst->write_object(name, std::move(data), true);
  }
  return id;
}

}  // namespace polydawg::endpoint
