#include "polydawg/endpoint/serialize.hpp"

#include <fmt/format.h>

#include "polydawg/text_util.hpp"

namespace polydawg::endpoint {

namespace {

std::string field(const Value& v) { return v.is_null() ? "\\N" : escape_tsv(to_text(v)); }

void line(std::string& out, const std::vector<std::string>& cells) {
  out += join(cells, "\t");
  out += '\n';
}

}  // namespace

std::string serialize_result(const ResultSet& result) {
  std::string out;
  std::visit(bql::Overloaded{
                 [&](const RelationalTable& t) {
                   std::vector<std::string> head;
                   for (const auto& c : t.columns) head.push_back(escape_tsv(c.name));
                   line(out, head);
                   for (const auto& row : t.rows) {
                     std::vector<std::string> cells;
                     for (const auto& v : row) cells.push_back(field(v));
                     line(out, cells);
                   }
                 },
                 [&](const ArrayObject& a) {
                   std::vector<std::string> head;
                   for (const auto& d : a.schema.dimensions) head.push_back(escape_tsv(d.name));
                   for (const auto& at : a.schema.attributes) head.push_back(escape_tsv(at.name));
                   line(out, head);
                   for (const auto& [coords, attrs] : a.cells) {
                     std::vector<std::string> cells;
                     for (auto c : coords) cells.push_back(std::to_string(c));
                     for (const auto& v : attrs) cells.push_back(field(v));
                     line(out, cells);
                   }
                 },
                 [&](const TextEntries& entries) {
                   line(out, {"row", "cf", "cq", "ts", "value"});
                   for (const auto& e : entries) {
                     line(out, {escape_tsv(e.key.row), escape_tsv(e.key.colfam),
                                escape_tsv(e.key.colqual), std::to_string(e.key.timestamp),
                                escape_tsv(e.value)});
                   }
                 },
             },
             result.data);
  return out;
}

std::string format_spans(const std::vector<TaskSpan>& spans, double total_ms) {
  std::string out = fmt::format("{:<20} {:>10} {:>10} {:>10} {:>7}\n", "task", "start_ms",
                                "end_ms", "ms", "share");
  for (const auto& s : spans) {
    const double share = total_ms > 0 ? 100.0 * s.duration() / total_ms : 0.0;
    out += fmt::format("{:<20} {:>10.3f} {:>10.3f} {:>10.3f} {:>6.1f}%\n", s.task, s.start_ms,
                       s.end_ms, s.duration(), share);
  }
  out += fmt::format("{:<20} {:>10} {:>10} {:>10.3f}\n", "total", "", "", total_ms);
  return out;
}

}  // namespace polydawg::endpoint
