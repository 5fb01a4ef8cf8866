#include "polydawg/engines/text.hpp"

#include <algorithm>

namespace polydawg::engines {

namespace {

/// Compares `key` against `bound` over the bound's non-empty components.
int compare_to_bound(const TextKey& key, const bql::TextBound& bound) {
  const std::string* parts[3][2] = {{&key.row, &bound.row},
                                    {&key.colfam, &bound.colfam},
                                    {&key.colqual, &bound.colqual}};
  for (auto& [k, b] : parts) {
    if (b->empty()) continue;
    const int c = k->compare(*b);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  return 0;
}

}  // namespace

bool in_range(const TextKey& key, const bql::TextRange& range) {
  if (range.start && compare_to_bound(key, *range.start) < 0) return false;
  if (range.end && compare_to_bound(key, *range.end) > 0) return false;
  return true;
}

TextEntries text_scan(const TextTable& table, const std::optional<bql::TextRange>& range) {
  TextEntries out;
  auto it = table.entries.begin();
  // Seek past rows below a start bound that constrains the row.
  if (range && range->start && !range->start->row.empty()) {
    it = table.entries.lower_bound(TextKey{range->start->row, "", "", INT64_MIN});
  }
  for (; it != table.entries.end(); ++it) {
    if (range && range->end && !range->end->row.empty() && it->first.row > range->end->row) break;
    if (!range || in_range(it->first, *range)) out.push_back(TextEntry{it->first, it->second});
  }
  return out;
}

void TextEngine::create_table(const std::string& name) { tables_.put(name, TextTable{}, false); }

void TextEngine::put(const std::string& name, const std::vector<TextPut>& puts) {
  count_call();
  tables_.update(name, [&](TextTable& t) {
    for (const auto& p : puts) {
      std::int64_t ts = p.timestamp.value_or(t.next_timestamp);
      t.next_timestamp = std::max(t.next_timestamp, ts + 1);
      t.entries.insert_or_assign(TextKey{p.row, p.colfam, p.colqual, ts}, p.value);
    }
  });
}

TextEntries TextEngine::scan(const std::string& name,
                             const std::optional<bql::TextRange>& range) const {
  return text_scan(*tables_.get(name), range);
}

TextEntries TextEngine::query(const bql::TextQuery& query, const Bindings& bindings) const {
  const std::string& name = std::visit(
      bql::Overloaded{[](const std::string& n) -> const std::string& { return n; },
                      [](const bql::CastLeaf& c) -> const std::string& {
                        return c.intermediate_name;
                      }},
      query.table);
  return scan(physical_name(bindings, name), query.range);
}

ResultSet TextEngine::execute(const bql::IslandQuery& query, const Bindings& bindings) const {
  count_call();
  const auto* text = std::get_if<bql::TextQuery>(&query.body);
  if (!text) {
    throw Error(ErrorCode::ShimUnsupported,
                std::string(to_string(query.island())) + " query sent to a text engine");
  }
  return ResultSet{this->query(*text, bindings)};
}

ResultSet TextEngine::read_object(const std::string& name) const {
  count_call();
  return ResultSet{scan(name)};
}

void TextEngine::write_object(const std::string& name, ResultSet data, bool replace) {
  count_call();
  auto* entries = std::get_if<TextEntries>(&data.data);
  if (!entries) throw Error(ErrorCode::SchemaMismatch, "text engine stores only key-value entries");
  TextTable t;
  for (auto& e : *entries) {
    t.next_timestamp = std::max(t.next_timestamp, e.key.timestamp + 1);
    t.entries.insert_or_assign(e.key, std::move(e.value));
  }
  tables_.put(name, std::move(t), replace);
}

std::size_t TextEngine::object_size(const std::string& name) const {
  return tables_.get(name)->entries.size();
}

}  // namespace polydawg::engines
