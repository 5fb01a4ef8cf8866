#pragma once

#include <string_view>

#include "polydawg/bql/ast.hpp"

namespace polydawg::bql {

/// Parses a complete BQL query: one of bdrel/bdarray/bdtext (with nested
/// bdcast operands) or a standalone bdcatalog. Keywords are case-insensitive,
/// identifiers case-sensitive. Every error carries a byte offset into `text`.
Ast parse(std::string_view text);

/// Parsers for the text between `bdrel(` / `bdarray(` / `bdtext(` and the
/// matching `)`. Offsets in errors are relative to `text`.
RelationalSelect parse_relational_body(std::string_view text);
ArrayExpr parse_array_body(std::string_view text);
TextQuery parse_text_body(std::string_view text);

/// `<attr:type, ...>[dim=low:high,chunk,overlap, ...]`; `*` as high means
/// unbounded. Chunk and overlap may be omitted.
ArraySchema parse_array_schema(std::string_view text);

/// `(col type, ...)`, the destination schema for casts into the relational island.
RelationalSchema parse_relational_schema(std::string_view text);

/// A single identifier naming the row-key column, for casts into the text island.
TextSchema parse_text_schema(std::string_view text);

}  // namespace polydawg::bql
