#include "polydawg/endpoint/bench.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>

#include "polydawg/error.hpp"

namespace polydawg::endpoint {

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const std::set<std::string>& execution_tasks() {
  static const std::set<std::string> tasks = {task::kRelationalQuery, task::kArrayQuery,
                                              task::kTextQuery, task::kMigratorDispatch,
                                              task::kMigration};
  return tasks;
}

}  // namespace

Distribution summarize(std::vector<double> samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples to summarize");
  std::sort(samples.begin(), samples.end());
  return Distribution{samples.front(), quantile(samples, 0.25), quantile(samples, 0.5),
                      quantile(samples, 0.75), samples.back()};
}

std::vector<BenchQuery> read_queries(std::istream& in) {
  std::vector<BenchQuery> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      out.push_back({"q" + std::to_string(out.size() + 1), line.substr(first)});
    } else {
      out.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
  }
  return out;
}

BenchReport run_bench(Polystore& store, const std::vector<BenchQuery>& queries, std::size_t runs) {
  BenchReport report;
  for (const auto& q : queries) {
    QueryReport r;
    r.name = q.name;
    r.text = q.text;
    std::vector<Response> responses;
    try {
      for (std::size_t i = 0; i < runs; ++i) {
        responses.push_back(store.query(q.text));
        r.totals_ms.push_back(responses.back().elapsed_ms);
      }
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    r.runs = r.totals_ms.size();
    if (!r.totals_ms.empty()) {
      r.stats = summarize(r.totals_ms);
      std::size_t rep = 0;
      for (std::size_t i = 1; i < r.totals_ms.size(); ++i) {
        if (std::abs(r.totals_ms[i] - r.stats.median) < std::abs(r.totals_ms[rep] - r.stats.median)) {
          rep = i;
        }
      }
      r.waterfall = responses[rep].spans;
      r.waterfall_total_ms = responses[rep].elapsed_ms;
      for (const auto& s : r.waterfall) {
        auto it = std::find_if(r.tasks.begin(), r.tasks.end(),
                               [&](const TaskShare& t) { return t.task == s.task; });
        if (it == r.tasks.end()) it = r.tasks.insert(r.tasks.end(), TaskShare{s.task, 0, 0});
        it->ms += s.duration();
      }
      for (auto& t : r.tasks) {
        t.fraction = r.waterfall_total_ms > 0 ? t.ms / r.waterfall_total_ms : 0;
        if (execution_tasks().count(t.task)) r.execution_fraction += t.fraction;
        if (t.task == task::kOptimization) r.optimization_fraction += t.fraction;
      }
    }
    report.queries.push_back(std::move(r));
  }
  return report;
}

std::string waterfall_csv(const BenchReport& report) {
  std::string out = "query,task,start_ms,end_ms,duration_ms,fraction\n";
  for (const auto& q : report.queries) {
    for (const auto& s : q.waterfall) {
      const double fraction = q.waterfall_total_ms > 0 ? s.duration() / q.waterfall_total_ms : 0;
      out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", csv_field(q.name),
                         csv_field(s.task), s.start_ms, s.end_ms, s.duration(), fraction);
    }
  }
  return out;
}

std::string distribution_csv(const BenchReport& report) {
  std::string out = "query,runs,min_ms,q1_ms,median_ms,q3_ms,max_ms\n";
  for (const auto& q : report.queries) {
    if (q.runs == 0) continue;
    const auto& d = q.stats;
    out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", csv_field(q.name), q.runs,
                       d.min, d.q1, d.median, d.q3, d.max);
  }
  return out;
}

std::string format_report(const BenchReport& report) {
  std::string out;
  for (const auto& q : report.queries) {
    out += fmt::format("{}: runs={}", q.name, q.runs);
    if (q.runs > 0) {
      const auto& d = q.stats;
      out += fmt::format(" min={:.3f} q1={:.3f} median={:.3f} q3={:.3f} max={:.3f} ms", d.min, d.q1,
                         d.median, d.q3, d.max);
    }
    out += '\n';
    if (!q.error.empty()) out += fmt::format("  error: {}\n", q.error);
    for (const auto& t : q.tasks) {
      out += fmt::format("  {:<20} {:>10.3f} ms {:>6.1f}%\n", t.task, t.ms, 100.0 * t.fraction);
    }
    if (q.runs > 0) {
      out += fmt::format("  execution fraction (engines + dispatch + migration): {:.1f}%\n",
                         100.0 * q.execution_fraction);
      out += fmt::format("  optimization fraction: {:.1f}%\n", 100.0 * q.optimization_fraction);
    }
  }
  return out;
}

std::vector<BenchQuery> demo_queries() {
  const std::string log_scan =
      "bdtext({ 'op' : 'scan', 'table' : 'mimic_logs', 'range' : { 'start' : ['r_0001','',''], "
      "'end' : ['r_0050','',''] } })";
  return {
      {"cast_chain",
       "bdarray(scan(bdcast(bdrel(SELECT poe_id, subject_id FROM mimic2v26.poe_order LIMIT 5), "
       "poe_order_copy, '<subject_id:int32>[poe_id=0:*,10000000,0]', array)))"},
      {"cast_chain_local", "bdrel(SELECT poe_id, subject_id FROM mimic2v26.poe_order LIMIT 5)"},
      {"array_to_rel",
       "bdrel(select dim1, dim2, val from bdcast(bdarray(filter(myarray, dim1>150)), hot_cells, "
       "'(dim1 int64, dim2 int64, val double, flag int32)', relational) where flag = 1)"},
      {"array_to_rel_local", "bdarray(filter(myarray, dim1>150))"},
      {"rel_to_text",
       "bdtext({ 'op' : 'scan', 'table' : bdcast(bdrel(select subject_id, sex, dob from "
       "mimic2v26.d_patients), patients_text, 'subject_id', text) })"},
      {"rel_to_text_local", "bdrel(select subject_id, sex, dob from mimic2v26.d_patients)"},
      {"text_to_rel",
       "bdrel(select row, cq, value from bdcast(" + log_scan +
           ", log_rows, '(row string, cf string, cq string, ts int64, value string)', relational))"},
      {"text_to_rel_local", log_scan},
  };
}

}  // namespace polydawg::endpoint
