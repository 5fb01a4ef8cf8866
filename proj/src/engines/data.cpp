#include "polydawg/engines/data.hpp"

#include <algorithm>

namespace polydawg {

std::optional<std::size_t> RelationalTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t ResultSet::cardinality() const {
  return std::visit(bql::Overloaded{
                        [](const RelationalTable& t) { return t.rows.size(); },
                        [](const ArrayObject& a) { return a.cells.size(); },
                        [](const TextEntries& e) { return e.size(); },
                    },
                    data);
}

namespace {

bool same_row(const Row& a, const Row& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_value(a[i], b[i])) return false;
  }
  return true;
}

bool row_less(const Row& a, const Row& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = order_values(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

}  // namespace

bool same_rows_multiset(const std::vector<Row>& a, const std::vector<Row>& b) {
  if (a.size() != b.size()) return false;
  std::vector<Row> x = a;
  std::vector<Row> y = b;
  std::stable_sort(x.begin(), x.end(), row_less);
  std::stable_sort(y.begin(), y.end(), row_less);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!same_row(x[i], y[i])) return false;
  }
  return true;
}

bool same_result(const ResultSet& a, const ResultSet& b, bool ordered) {
  if (a.data.index() != b.data.index()) return false;
  if (a.island() == bql::Island::Relational) {
    const auto& x = a.table();
    const auto& y = b.table();
    if (x.columns != y.columns) return false;
    if (!ordered) return same_rows_multiset(x.rows, y.rows);
    if (x.rows.size() != y.rows.size()) return false;
    for (std::size_t i = 0; i < x.rows.size(); ++i) {
      if (!same_row(x.rows[i], y.rows[i])) return false;
    }
    return true;
  }
  if (a.island() == bql::Island::Array) {
    const auto& x = a.array();
    const auto& y = b.array();
    if (x.schema != y.schema || x.cells.size() != y.cells.size()) return false;
    auto it = y.cells.begin();
    for (const auto& [coords, attrs] : x.cells) {
      if (coords != it->first || !same_row(attrs, it->second)) return false;
      ++it;
    }
    return true;
  }
  return a.entries() == b.entries();
}

}  // namespace polydawg
