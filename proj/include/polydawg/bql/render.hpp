#pragma once

#include <string>

#include "polydawg/bql/ast.hpp"

namespace polydawg::bql {

struct RenderOptions {
  /// Replace every literal (including LIMIT counts and text range labels)
  /// with `?`. Used to build literal-free structure keys.
  bool strip_literals = false;
};

/// Canonical BQL text. parse(render(ast)) == ast for every Ast the parser
/// can produce.
std::string render(const Ast& ast, const RenderOptions& options = {});
std::string render(const IslandQuery& query, const RenderOptions& options = {});
std::string render(const Expr& expr, const RenderOptions& options = {});
std::string render(const ArraySchema& schema);
std::string render(const RelationalSchema& schema);
std::string render(const DestSchema& schema);

/// Quotes `s` as a single-quoted BQL string literal.
std::string quote(std::string_view s);

}  // namespace polydawg::bql
