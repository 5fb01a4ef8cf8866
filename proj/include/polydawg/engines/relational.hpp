#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/engines/data.hpp"
#include "polydawg/engines/engine.hpp"

namespace polydawg::engines {

using TableLookup = std::function<std::shared_ptr<const RelationalTable>(const std::string&)>;

/// Evaluates a single-layered SELECT. Semantics: cross product of the FROM
/// items in order, WHERE, grouping, projection, DISTINCT (first occurrence
/// kept), stable ORDER BY (nulls last ascending), LIMIT. Without ORDER BY the
/// output follows nested-loop order with the first FROM item outermost.
/// Single-table conjuncts are applied at scan time and equality conjuncts
/// between tables become hash joins; neither changes the output order.
RelationalTable execute_select(const bql::RelationalSelect& select, const TableLookup& lookup);

/// Checks `row` against `columns` and converts values to the column types.
Row conform_row(const std::vector<bql::ColumnDesc>& columns, const Row& row);

class RelationalEngine final : public StorageEngine {
 public:
  RelationalEngine() : tables_(ErrorCode::UnknownTable) {}

  bql::Island island() const override { return bql::Island::Relational; }

  void create_table(const std::string& name, std::vector<bql::ColumnDesc> columns);
  void insert_rows(const std::string& name, const std::vector<Row>& rows);
  std::shared_ptr<const RelationalTable> table(const std::string& name) const;

  RelationalTable select(const bql::RelationalSelect& select, const Bindings& bindings = {}) const;

  ResultSet execute(const bql::IslandQuery& query, const Bindings& bindings) const override;
  ResultSet read_object(const std::string& name) const override;
  void write_object(const std::string& name, ResultSet data, bool replace) override;
  bool has_object(const std::string& name) const override { return tables_.contains(name); }
  bool drop_object(const std::string& name) override { return tables_.erase(name); }
  std::vector<std::string> object_names() const override { return tables_.names(); }
  std::size_t object_size(const std::string& name) const override;

 private:
  ObjectStore<RelationalTable> tables_;
};

}  // namespace polydawg::engines
