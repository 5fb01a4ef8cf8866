#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/engines/data.hpp"
#include "polydawg/engines/engine.hpp"

namespace polydawg::engines {

/// Sorted key-value entries. Timestamps default to a per-table counter.
struct TextTable {
  std::map<TextKey, std::string> entries;
  std::int64_t next_timestamp = 1;
};

/// Range predicate on (row, colfam, colqual). Each bound compares
/// lexicographically over its non-empty components only; both ends inclusive.
bool in_range(const TextKey& key, const bql::TextRange& range);

TextEntries text_scan(const TextTable& table, const std::optional<bql::TextRange>& range);

struct TextPut {
  std::string row;
  std::string colfam;
  std::string colqual;
  std::optional<std::int64_t> timestamp;
  std::string value;
};

class TextEngine final : public StorageEngine {
 public:
  TextEngine() : tables_(ErrorCode::UnknownTable) {}

  bql::Island island() const override { return bql::Island::Text; }

  void create_table(const std::string& name);
  /// Writes entries; an entry with an identical full key is overwritten.
  void put(const std::string& name, const std::vector<TextPut>& puts);
  TextEntries scan(const std::string& name,
                   const std::optional<bql::TextRange>& range = std::nullopt) const;

  TextEntries query(const bql::TextQuery& query, const Bindings& bindings = {}) const;

  ResultSet execute(const bql::IslandQuery& query, const Bindings& bindings) const override;
  ResultSet read_object(const std::string& name) const override;
  void write_object(const std::string& name, ResultSet data, bool replace) override;
  bool has_object(const std::string& name) const override { return tables_.contains(name); }
  bool drop_object(const std::string& name) override { return tables_.erase(name); }
  std::vector<std::string> object_names() const override { return tables_.names(); }
  std::size_t object_size(const std::string& name) const override;

 private:
  ObjectStore<TextTable> tables_;
};

}  // namespace polydawg::engines
