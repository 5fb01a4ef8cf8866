#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/value.hpp"

namespace polydawg {

using Row = std::vector<Value>;

struct RelationalTable {
  std::vector<bql::ColumnDesc> columns;
  std::vector<Row> rows;

  std::optional<std::size_t> column_index(std::string_view name) const;
  bool operator==(const RelationalTable&) const = default;
};

using Coordinates = std::vector<std::int64_t>;

/// Cells keyed by coordinates; iteration is row-major coordinate order.
struct ArrayObject {
  bql::ArraySchema schema;
  std::map<Coordinates, Row> cells;

  bool operator==(const ArrayObject&) const = default;
};

struct TextKey {
  std::string row;
  std::string colfam;
  std::string colqual;
  std::int64_t timestamp = 0;

  auto operator<=>(const TextKey&) const = default;
  bool operator==(const TextKey&) const = default;
};

struct TextEntry {
  TextKey key;
  std::string value;

  bool operator==(const TextEntry&) const = default;
};

using TextEntries = std::vector<TextEntry>;

/// Result of one island query, in the data model of the island that ran it.
struct ResultSet {
  std::variant<RelationalTable, ArrayObject, TextEntries> data;
  int engine_id = -1;
  double elapsed_ms = 0;

  bql::Island island() const { return static_cast<bql::Island>(data.index()); }
  /// Rows, cells or entries.
  std::size_t cardinality() const;

  const RelationalTable& table() const { return std::get<RelationalTable>(data); }
  const ArrayObject& array() const { return std::get<ArrayObject>(data); }
  const TextEntries& entries() const { return std::get<TextEntries>(data); }
};

/// Structural equality of the data only. Relational rows compare as
/// multisets unless `ordered` is set; arrays and text are inherently ordered.
bool same_result(const ResultSet& a, const ResultSet& b, bool ordered = false);

/// Multiset equality of row lists under same_value.
bool same_rows_multiset(const std::vector<Row>& a, const std::vector<Row>& b);

}  // namespace polydawg
