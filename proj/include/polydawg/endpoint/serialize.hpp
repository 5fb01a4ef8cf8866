#pragma once

#include <string>
#include <vector>

#include "polydawg/engines/data.hpp"
#include "polydawg/executor/spans.hpp"

namespace polydawg::endpoint {

/// TSV with a header row. Relational: one line per row. Array: dimensions
/// then attributes, cells in coordinate order. Text: `row cf cq ts value`.
/// Null is written as `\N`; other fields are TSV-escaped.
std::string serialize_result(const ResultSet& result);

/// Fixed-width span table for interactive display.
std::string format_spans(const std::vector<TaskSpan>& spans, double total_ms);

}  // namespace polydawg::endpoint
