#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "polydawg/endpoint/bench.hpp"
#include "polydawg/endpoint/loader.hpp"
#include "polydawg/endpoint/serialize.hpp"
#include "polydawg/endpoint/server.hpp"
#include "polydawg/polystore.hpp"

namespace py = pybind11;
using namespace polydawg;

namespace {

py::object to_python(const Value& v) {
  if (v.is_null()) return py::none();
  if (v.is_bool()) return py::bool_(v.as_bool());
  if (v.is_integer()) return py::int_(v.as_int64());
  if (v.is_double()) return py::float_(v.as_double());
  return py::str(v.as_string());
}

/// Columns and row tuples in the result's own data model.
py::dict result_dict(const ResultSet& r) {
  py::list columns;
  py::list rows;
  std::visit(bql::Overloaded{
                 [&](const RelationalTable& t) {
                   for (const auto& c : t.columns) columns.append(c.name);
                   for (const auto& row : t.rows) {
                     py::tuple out(row.size());
                     for (std::size_t i = 0; i < row.size(); ++i) out[i] = to_python(row[i]);
                     rows.append(out);
                   }
                 },
                 [&](const ArrayObject& a) {
                   for (const auto& d : a.schema.dimensions) columns.append(d.name);
                   for (const auto& at : a.schema.attributes) columns.append(at.name);
                   for (const auto& [coords, attrs] : a.cells) {
                     py::tuple out(coords.size() + attrs.size());
                     std::size_t i = 0;
                     for (auto c : coords) out[i++] = py::int_(c);
                     for (const auto& v : attrs) out[i++] = to_python(v);
                     rows.append(out);
                   }
                 },
                 [&](const TextEntries& entries) {
                   for (const char* c : {"row", "cf", "cq", "ts", "value"}) columns.append(c);
                   for (const auto& e : entries) {
                     rows.append(py::make_tuple(e.key.row, e.key.colfam, e.key.colqual,
                                                e.key.timestamp, e.value));
                   }
                 },
             },
             r.data);
  py::dict out;
  out["island"] = std::string(to_string(r.island()));
  out["columns"] = columns;
  out["rows"] = rows;
  return out;
}

py::dict response_dict(const Response& r) {
  py::dict out = result_dict(r.result);
  out["tsv"] = endpoint::serialize_result(r.result);
  out["plan_id"] = r.plan_id;
  out["plan_count"] = r.plan_count;
  out["elapsed_ms"] = r.elapsed_ms;
  out["warnings"] = r.warnings;
  py::list spans;
  for (const auto& s : r.spans) spans.append(py::make_tuple(s.task, s.start_ms, s.end_ms));
  out["spans"] = spans;
  return out;
}

py::dict report_dict(const endpoint::QueryReport& q) {
  py::dict out;
  out["name"] = q.name;
  out["runs"] = q.runs;
  out["totals_ms"] = q.totals_ms;
  out["min_ms"] = q.stats.min;
  out["median_ms"] = q.stats.median;
  out["max_ms"] = q.stats.max;
  out["execution_fraction"] = q.execution_fraction;
  out["optimization_fraction"] = q.optimization_fraction;
  out["error"] = q.error;
  return out;
}

}  // namespace

PYBIND11_MODULE(_polydawg, m) {
  m.doc() = "Polystore middleware over relational, array and text engines";

  static py::handle error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = error_type(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      instance.attr("offset") = e.offset() ? py::cast(*e.offset()) : py::object(py::none());
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  py::class_<Polystore>(m, "Polystore")
      .def(py::init<std::size_t>(), py::arg("workers") = 4)
      .def(
          "query",
          [](Polystore& s, const std::string& text, bool training) {
            Response r;
            {
              py::gil_scoped_release release;
              r = s.query(text, training);
            }
            return response_dict(r);
          },
          py::arg("text"), py::arg("training") = false)
      .def(
          "load_demo",
          [](Polystore& s, bool force) {
            py::gil_scoped_release release;
            return endpoint::load_demo_dataset(s, force).objects;
          },
          py::arg("force") = false)
      .def("add_replica", &endpoint::add_relational_replica, py::arg("engine_name"))
      .def("save", &Polystore::save, py::arg("path"))
      .def("open", &Polystore::open, py::arg("path"))
      .def(
          "admin",
          [](Polystore& s, const std::vector<std::string>& args) {
            std::ostringstream out;
            endpoint::run_admin(s, args, out);
            return out.str();
          },
          py::arg("args"))
      .def(
          "bench",
          [](Polystore& s, const std::vector<std::pair<std::string, std::string>>& queries,
             std::size_t runs) {
            std::vector<endpoint::BenchQuery> qs;
            for (const auto& [name, text] : queries) qs.push_back({name, text});
            endpoint::BenchReport report;
            {
              py::gil_scoped_release release;
              report = endpoint::run_bench(s, qs, runs);
            }
            py::list out;
            for (const auto& q : report.queries) out.append(report_dict(q));
            return out;
          },
          py::arg("queries"), py::arg("runs") = 50)
      .def("integrity_violations",
           [](const Polystore& s) { return s.catalog().integrity_violations(); });

  m.def("demo_queries", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& q : endpoint::demo_queries()) out.emplace_back(q.name, q.text);
    return out;
  });
}
