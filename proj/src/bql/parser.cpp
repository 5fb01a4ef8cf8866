#include "polydawg/bql/parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <set>

#include "polydawg/bql/lexer.hpp"
#include "polydawg/error.hpp"
#include "polydawg/text_util.hpp"

namespace polydawg::bql {
namespace {

constexpr std::array kReserved = {
    "select", "from",  "where",  "group", "order", "by",    "limit",  "as",
    "and",    "or",    "not",    "is",    "null",  "true",  "false",  "distinct",
    "asc",    "desc",  "having", "union", "join",  "on",    "offset", "inner",
    "left",   "right", "outer",  "cross", "full",  "natural", "except", "intersect",
};

bool is_reserved(std::string_view word) {
  const std::string w = to_lower(word);
  return std::find(kReserved.begin(), kReserved.end(), w) != kReserved.end();
}

bool is_function_token(std::string_view word) {
  const std::string w = to_lower(word);
  return w == "bdrel" || w == "bdarray" || w == "bdtext" || w == "bdcast" || w == "bdcatalog";
}

bool legal_object_name(std::string_view name) {
  if (name.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

/// Parses an unsigned integer literal token. Values above int64 max are only
/// legal when negated.
std::uint64_t integer_magnitude(const Token& tok) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), out);
  if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
    throw Error(ErrorCode::SyntaxError, "integer literal out of range", tok.offset);
  }
  return out;
}

Value integer_value(std::uint64_t magnitude, bool negative, std::size_t offset) {
  constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
  std::int64_t v = 0;
  if (negative) {
    if (magnitude > kMax + 1) throw Error(ErrorCode::SyntaxError, "integer literal out of range", offset);
    v = magnitude == kMax + 1 ? std::numeric_limits<std::int64_t>::min()
                              : -static_cast<std::int64_t>(magnitude);
  } else {
    if (magnitude > kMax) throw Error(ErrorCode::SyntaxError, "integer literal out of range", offset);
    v = static_cast<std::int64_t>(magnitude);
  }
  if (v >= std::numeric_limits<std::int32_t>::min() && v <= std::numeric_limits<std::int32_t>::max()) {
    return Value(static_cast<std::int32_t>(v));
  }
  return Value(v);
}

Value float_value(const Token& tok, bool negative) {
  double d = 0;
  auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), d);
  if (ec != std::errc()) throw Error(ErrorCode::SyntaxError, "bad numeric literal", tok.offset);
  return Value(negative ? -d : d);
}

class Parser {
 public:
  Parser(std::string_view source, std::vector<Token> tokens)
      : source_(source), tokens_(std::move(tokens)) {}

  // ---- token helpers -----------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at(TokenKind kind, std::size_t ahead = 0) const { return peek(ahead).kind == kind; }
  bool at_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Ident && iequals(t.text, kw);
  }
  Token take() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool accept(TokenKind kind) {
    if (!at(kind)) return false;
    take();
    return true;
  }
  bool accept_keyword(std::string_view kw) {
    if (!at_keyword(kw)) return false;
    take();
    return true;
  }

  [[noreturn]] void fail_expected(std::string_view what) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorCode::SyntaxError, "expected " + std::string(what) + ", found " + found,
                t.offset);
  }

  Token expect(TokenKind kind, std::string_view what = {}) {
    if (!at(kind)) fail_expected(what.empty() ? to_string(kind) : what);
    return take();
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail_expected(to_upper(kw));
  }
  void expect_end() {
    if (!at(TokenKind::End)) fail_expected("end of input");
  }

  std::string identifier(std::string_view what) {
    if (at(TokenKind::Ident) || at(TokenKind::QuotedIdent)) return take().text;
    fail_expected(what);
  }

  // ---- top level ---------------------------------------------------------

  Ast parse_query() {
    const Token& head = peek();
    if (head.kind != TokenKind::Ident) fail_expected("function token");
    const std::string name = to_lower(head.text);
    Ast ast;
    if (name == "bdcatalog") {
      ast.node = parse_catalog();
    } else if (name == "bdcast") {
      throw Error(ErrorCode::MisplacedCast,
                  "bdcast must be nested inside an island query", head.offset);
    } else if (name == "bdrel" || name == "bdarray" || name == "bdtext") {
      ast.node = parse_island_query();
    } else {
      throw Error(ErrorCode::UnknownFunctionToken, "unknown function token '" + head.text + "'",
                  head.offset);
    }
    expect_end();
    return ast;
  }

  IslandQuery parse_island_query() {
    const Token head = take();
    const std::string name = to_lower(head.text);
    expect(TokenKind::LParen);
    IslandQuery q;
    if (name == "bdrel") {
      q.body = parse_select();
    } else if (name == "bdarray") {
      q.body = parse_array_top();
    } else {
      q.body = parse_text_object();
    }
    expect(TokenKind::RParen);
    return q;
  }

  /// Retrieval query in a nested position (inside bdcast).
  IslandQuery parse_nested_retrieval() {
    const Token& head = peek();
    if (head.kind != TokenKind::Ident || !at(TokenKind::LParen, 1)) {
      fail_expected("bdrel, bdarray or bdtext query");
    }
    const std::string name = to_lower(head.text);
    if (name == "bdcatalog") {
      throw Error(ErrorCode::MisplacedCatalog, "bdcatalog cannot be nested", head.offset);
    }
    if (name == "bdcast") {
      throw Error(ErrorCode::MisplacedCast,
                  "bdcast must be nested between island queries", head.offset);
    }
    if (name != "bdrel" && name != "bdarray" && name != "bdtext") {
      throw Error(ErrorCode::UnknownFunctionToken, "unknown function token '" + head.text + "'",
                  head.offset);
    }
    return parse_island_query();
  }

  /// Called at an identifier followed by '(' in an operand position that is
  /// not a cast. Raises the appropriate placement error for function tokens.
  [[noreturn]] void reject_function_token(const Token& head) const {
    const std::string name = to_lower(head.text);
    if (name == "bdcatalog") {
      throw Error(ErrorCode::MisplacedCatalog, "bdcatalog cannot be nested", head.offset);
    }
    throw Error(ErrorCode::SyntaxError,
                "nested island query must be wrapped in bdcast", head.offset);
  }

  CastLeaf parse_cast() {
    take();  // bdcast
    expect(TokenKind::LParen);
    CastLeaf cast;
    cast.inner = parse_nested_retrieval();
    expect(TokenKind::Comma);

    const Token name_tok = peek();
    std::string name;
    if (at(TokenKind::Ident) || at(TokenKind::String)) {
      name = take().text;
    } else {
      fail_expected("intermediate result name");
    }
    if (!legal_object_name(name) || is_function_token(name)) {
      throw Error(ErrorCode::SyntaxError, "illegal intermediate name '" + name + "'",
                  name_tok.offset);
    }
    cast.intermediate_name = name;
    expect(TokenKind::Comma);

    const auto [schema_text, schema_offset] = raw_schema();
    expect(TokenKind::Comma);

    const Token island_tok = peek();
    std::optional<Island> island;
    if (at(TokenKind::Ident) || at(TokenKind::String)) island = parse_island(take().text);
    if (!island) {
      throw Error(ErrorCode::SyntaxError, "expected relational, array or text",
                  island_tok.offset);
    }
    cast.dest_island = *island;
    expect(TokenKind::RParen);

    try {
      switch (*island) {
        case Island::Array: cast.dest_schema = parse_array_schema(schema_text); break;
        case Island::Relational: cast.dest_schema = parse_relational_schema(schema_text); break;
        case Island::Text: cast.dest_schema = parse_text_schema(schema_text); break;
      }
    } catch (const Error& e) {
      throw Error(e.code(), strip_prefix(e.what()), schema_offset + e.offset().value_or(0));
    }
    return cast;
  }

  /// Schema operand of a cast, quoted or bare. Returns its text and the
  /// source offset of its first character.
  std::pair<std::string, std::size_t> raw_schema() {
    const Token& t = peek();
    if (t.kind == TokenKind::String) {
      take();
      return {t.text, t.offset + 1};
    }
    if (t.kind == TokenKind::Ident) {
      take();
      return {t.text, t.offset};
    }
    if (t.kind == TokenKind::Lt) return raw_until(TokenKind::Lt, TokenKind::RBracket);
    if (t.kind == TokenKind::LParen) return raw_until(TokenKind::LParen, TokenKind::RParen);
    fail_expected("destination schema");
  }

  std::pair<std::string, std::size_t> raw_until(TokenKind open, TokenKind close) {
    const std::size_t start = peek().offset;
    int depth = 0;
    while (!at(TokenKind::End)) {
      const Token t = take();
      if (open == TokenKind::LParen && t.kind == TokenKind::LParen) ++depth;
      if (t.kind == close) {
        if (open == TokenKind::LParen) --depth;
        if (depth <= 0) {
          return {std::string(source_.substr(start, t.offset + t.length - start)), start};
        }
      }
    }
    fail_expected(to_string(close));
  }

  static std::string strip_prefix(const std::string& message) {
    const auto pos = message.find(": ");
    return pos == std::string::npos ? message : message.substr(pos + 2);
  }

  // ---- catalog -----------------------------------------------------------

  CatalogQuery parse_catalog() {
    take();  // bdcatalog
    expect(TokenKind::LParen);
    CatalogQuery q;
    if (at_keyword("select")) {
      take();
      if (!accept(TokenKind::Star)) {
        do {
          q.columns.push_back(identifier("column name"));
        } while (accept(TokenKind::Comma));
      }
      expect_keyword("from");
      q.table = identifier("catalog table name");
      if (accept_keyword("where")) {
        CatalogFilter filter;
        filter.column = identifier("column name");
        expect(TokenKind::Eq, "'='");
        filter.value = catalog_literal();
        q.filter = std::move(filter);
      }
    } else {
      const Token& t = peek();
      if (t.kind == TokenKind::Ident && at(TokenKind::LParen, 1)) {
        if (is_function_token(t.text)) {
          throw Error(ErrorCode::MisplacedCatalog, "bdcatalog cannot contain island queries",
                      t.offset);
        }
      }
      q.table = identifier("catalog table name");
      if (accept(TokenKind::Comma) || at(TokenKind::Ident) || at(TokenKind::QuotedIdent)) {
        do {
          q.columns.push_back(identifier("column name"));
        } while (accept(TokenKind::Comma));
      }
    }
    expect(TokenKind::RParen);
    return q;
  }

  Value catalog_literal() {
    const bool negative = accept(TokenKind::Minus);
    const Token t = peek();
    if (t.kind == TokenKind::Integer) {
      take();
      return integer_value(integer_magnitude(t), negative, t.offset);
    }
    if (t.kind == TokenKind::Float) {
      take();
      return float_value(t, negative);
    }
    if (!negative && t.kind == TokenKind::String) return Value(take().text);
    if (!negative && at_keyword("true")) return take(), Value(true);
    if (!negative && at_keyword("false")) return take(), Value(false);
    fail_expected("literal");
  }

  // ---- relational --------------------------------------------------------

  RelationalSelect parse_select() {
    RelationalSelect s;
    const std::size_t start = peek().offset;
    if (at(TokenKind::LParen) && at_keyword("select", 1)) {
      throw Error(ErrorCode::UnsupportedSqlFeature, "subqueries are not supported",
                  peek().offset);
    }
    expect_keyword("select");
    s.distinct = accept_keyword("distinct");
    if (accept(TokenKind::Star)) {
      s.star = true;
    } else {
      do {
        SelectItem item;
        item.expr = parse_expr(true);
        item.alias = optional_alias();
        s.projections.push_back(std::move(item));
      } while (accept(TokenKind::Comma));
    }
    expect_keyword("from");
    do {
      s.from.push_back(parse_from_item());
    } while (accept(TokenKind::Comma));
    reject_unsupported_clause();

    if (accept_keyword("where")) s.where = parse_expr(false);
    reject_unsupported_clause();
    if (at_keyword("group")) {
      take();
      expect_keyword("by");
      do {
        s.group_by.push_back(parse_column_ref());
      } while (accept(TokenKind::Comma));
    }
    reject_unsupported_clause();
    if (at_keyword("order")) {
      take();
      expect_keyword("by");
      do {
        OrderItem item;
        item.expr = parse_expr(true);
        if (accept_keyword("desc")) {
          item.descending = true;
        } else {
          accept_keyword("asc");
        }
        s.order_by.push_back(std::move(item));
      } while (accept(TokenKind::Comma));
    }
    reject_unsupported_clause();
    if (accept_keyword("limit")) {
      const Token t = expect(TokenKind::Integer, "non-negative integer");
      s.limit = integer_value(integer_magnitude(t), false, t.offset).as_int64();
    }
    reject_unsupported_clause();
    validate_grouping(s, start);
    return s;
  }

  void reject_unsupported_clause() {
    for (const char* kw : {"having", "union", "except", "intersect", "offset", "join", "inner",
                           "left", "right", "full", "cross", "natural", "on"}) {
      if (at_keyword(kw)) {
        throw Error(ErrorCode::UnsupportedSqlFeature,
                    to_upper(kw) + " is not supported; the relational island accepts a "
                                   "single-layered SELECT",
                    peek().offset);
      }
    }
  }

  std::optional<std::string> optional_alias() {
    if (accept_keyword("as")) return identifier("alias");
    if (at(TokenKind::QuotedIdent)) return take().text;
    if (at(TokenKind::Ident) && !is_reserved(peek().text) && !at(TokenKind::LParen, 1)) {
      return take().text;
    }
    return std::nullopt;
  }

  std::string qualified_name(std::string_view what) {
    std::string name = identifier(what);
    while (at(TokenKind::Dot)) {
      take();
      name += "." + identifier(what);
    }
    return name;
  }

  FromItem parse_from_item() {
    FromItem item;
    const Token& t = peek();
    if (t.kind == TokenKind::LParen) {
      if (at_keyword("select", 1)) {
        throw Error(ErrorCode::UnsupportedSqlFeature, "subqueries are not supported", t.offset);
      }
      fail_expected("table name or bdcast");
    }
    if (t.kind == TokenKind::Ident && at(TokenKind::LParen, 1)) {
      if (iequals(t.text, "bdcast")) {
        item.source = parse_cast();
      } else {
        reject_function_token(t);
      }
    } else {
      item.source = qualified_name("table name");
    }
    item.alias = optional_alias();
    return item;
  }

  Expr parse_column_ref() {
    std::vector<std::string> parts{identifier("column name")};
    while (at(TokenKind::Dot)) {
      take();
      parts.push_back(identifier("column name"));
    }
    std::string name = parts.back();
    parts.pop_back();
    return Expr::make_column(join(parts, "."), std::move(name));
  }

  /// `allow_aggregates`: aggregate calls are legal (SELECT list, ORDER BY).
  Expr parse_expr(bool allow_aggregates) {
    const bool saved = allow_aggregates_;
    allow_aggregates_ = allow_aggregates;
    Expr e = parse_or();
    allow_aggregates_ = saved;
    return e;
  }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (at_keyword("or")) {
      take();
      lhs = Expr::make_binary("OR", std::move(lhs), parse_and());
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (at_keyword("and")) {
      take();
      lhs = Expr::make_binary("AND", std::move(lhs), parse_not());
    }
    return lhs;
  }

  Expr parse_not() {
    if (accept_keyword("not")) return Expr::make_unary("NOT", parse_not());
    return parse_comparison();
  }

  Expr parse_comparison() {
    Expr lhs = parse_additive();
    if (at_keyword("is")) {
      take();
      const bool negated = accept_keyword("not");
      expect_keyword("null");
      return Expr::make_is_null(std::move(lhs), negated);
    }
    std::string op;
    switch (peek().kind) {
      case TokenKind::Eq: op = "="; break;
      case TokenKind::Ne: op = "<>"; break;
      case TokenKind::Lt: op = "<"; break;
      case TokenKind::Le: op = "<="; break;
      case TokenKind::Gt: op = ">"; break;
      case TokenKind::Ge: op = ">="; break;
      default: return lhs;
    }
    take();
    return Expr::make_binary(op, std::move(lhs), parse_additive());
  }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
      const std::string op = take().text;
      lhs = Expr::make_binary(op, std::move(lhs), parse_multiplicative());
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_unary();
    while (at(TokenKind::Star) || at(TokenKind::Slash)) {
      const std::string op = take().text;
      lhs = Expr::make_binary(op, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (at(TokenKind::Minus)) {
      take();
      const Token& t = peek();
      if (t.kind == TokenKind::Integer) {
        take();
        return Expr::make_literal(integer_value(integer_magnitude(t), true, t.offset));
      }
      if (t.kind == TokenKind::Float) {
        take();
        return Expr::make_literal(float_value(t, true));
      }
      return Expr::make_unary("-", parse_unary());
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token t = peek();
    switch (t.kind) {
      case TokenKind::Integer:
        take();
        return Expr::make_literal(integer_value(integer_magnitude(t), false, t.offset));
      case TokenKind::Float:
        take();
        return Expr::make_literal(float_value(t, false));
      case TokenKind::String:
        take();
        return Expr::make_literal(Value(t.text));
      case TokenKind::LParen: {
        if (at_keyword("select", 1)) {
          throw Error(ErrorCode::UnsupportedSqlFeature, "subqueries are not supported",
                      t.offset);
        }
        take();
        Expr inner = parse_or();
        expect(TokenKind::RParen);
        return inner;
      }
      case TokenKind::QuotedIdent:
        return parse_column_ref();
      case TokenKind::Ident:
        break;
      default:
        fail_expected("expression");
    }
    if (at_keyword("null")) return take(), Expr::make_literal(Value::null());
    if (at_keyword("true")) return take(), Expr::make_literal(Value(true));
    if (at_keyword("false")) return take(), Expr::make_literal(Value(false));
    if (at(TokenKind::LParen, 1)) return parse_call();
    if (is_reserved(t.text)) fail_expected("expression");
    return parse_column_ref();
  }

  Expr parse_call() {
    const Token head = take();
    const std::string fn = to_lower(head.text);
    if (is_function_token(fn)) {
      if (fn == "bdcatalog") {
        throw Error(ErrorCode::MisplacedCatalog, "bdcatalog cannot be nested", head.offset);
      }
      throw Error(ErrorCode::MisplacedCast,
                  "function tokens cannot appear inside expressions", head.offset);
    }
    if (!is_aggregate_function(fn)) {
      throw Error(ErrorCode::UnsupportedSqlFeature, "unsupported function '" + head.text + "'",
                  head.offset);
    }
    if (!allow_aggregates_) {
      throw Error(ErrorCode::InvalidGrouping,
                  "aggregate function '" + fn + "' is not allowed here", head.offset);
    }
    expect(TokenKind::LParen);
    if (at_keyword("distinct")) {
      throw Error(ErrorCode::UnsupportedSqlFeature, "DISTINCT aggregates are not supported",
                  peek().offset);
    }
    std::vector<Expr> args;
    if (at(TokenKind::Star)) {
      if (fn != "count") fail_expected("aggregate argument");
      take();
      args.push_back(Expr::make_star());
    } else {
      const bool saved = allow_aggregates_;
      allow_aggregates_ = false;
      args.push_back(parse_or());
      allow_aggregates_ = saved;
    }
    expect(TokenKind::RParen);
    return Expr::make_call(fn, std::move(args));
  }

  // Grouping rule: every column referenced outside an aggregate must be a
  // GROUP BY column.
  static bool matches_group_key(const Expr& col, const std::vector<Expr>& keys) {
    return std::any_of(keys.begin(), keys.end(), [&](const Expr& k) {
      return k.name == col.name &&
             (k.qualifier == col.qualifier || k.qualifier.empty() || col.qualifier.empty());
    });
  }

  static void free_columns(const Expr& e, std::vector<const Expr*>& out) {
    if (e.kind == Expr::Kind::Call) return;
    if (e.kind == Expr::Kind::Column) out.push_back(&e);
    for (const auto& a : e.args) free_columns(a, out);
  }

  void validate_grouping(const RelationalSelect& s, std::size_t offset) const {
    if (!s.is_grouped()) return;
    if (s.star) {
      throw Error(ErrorCode::InvalidGrouping, "SELECT * cannot be combined with aggregation",
                  offset);
    }
    std::set<std::string> aliases;
    for (const auto& item : s.projections) {
      if (item.alias) aliases.insert(*item.alias);
      std::vector<const Expr*> cols;
      free_columns(item.expr, cols);
      for (const Expr* c : cols) {
        if (!matches_group_key(*c, s.group_by)) {
          throw Error(ErrorCode::InvalidGrouping,
                      "column '" + c->name + "' must appear in GROUP BY or inside an aggregate",
                      offset);
        }
      }
    }
    for (const auto& item : s.order_by) {
      if (item.expr.kind == Expr::Kind::Column && item.expr.qualifier.empty() &&
          aliases.count(item.expr.name)) {
        continue;
      }
      std::vector<const Expr*> cols;
      free_columns(item.expr, cols);
      for (const Expr* c : cols) {
        if (!matches_group_key(*c, s.group_by)) {
          throw Error(ErrorCode::InvalidGrouping,
                      "ORDER BY column '" + c->name + "' must appear in GROUP BY", offset);
        }
      }
    }
  }

  // ---- array -------------------------------------------------------------

  ArrayExpr parse_array_top() {
    const Token& t = peek();
    if (t.kind == TokenKind::Ident && at(TokenKind::LParen, 1)) {
      const std::string name = to_lower(t.text);
      if (name == "bdcast") {
        throw Error(ErrorCode::MisplacedCast, "bdcast must be an operand of an array operator",
                    t.offset);
      }
      if (is_function_token(name)) reject_function_token(t);
      return parse_array_operator();
    }
    fail_expected("array operator");
  }

  ArrayExpr parse_dataset() {
    const Token& t = peek();
    if (t.kind == TokenKind::Ident && at(TokenKind::LParen, 1)) {
      if (iequals(t.text, "bdcast")) return ArrayExpr{ArrayRef{parse_cast()}};
      if (is_function_token(t.text)) reject_function_token(t);
      return parse_array_operator();
    }
    if (t.kind == TokenKind::Ident || t.kind == TokenKind::QuotedIdent) {
      return ArrayExpr{ArrayRef{qualified_name("array name")}};
    }
    fail_expected("array name, array operator or bdcast");
  }

  [[noreturn]] void arity(const Token& head, std::string_view message) const {
    throw Error(ErrorCode::ArityError, to_lower(head.text) + ": " + std::string(message),
                head.offset);
  }

  ArrayExpr parse_array_operator() {
    const Token head = take();
    const std::string op = to_lower(head.text);
    static const std::set<std::string> kOps = {"scan",  "project",   "filter",      "aggregate",
                                               "apply", "cross_join", "redimension", "sort"};
    if (!kOps.count(op)) {
      throw Error(ErrorCode::UnknownArrayOperator, "unknown array operator '" + head.text + "'",
                  head.offset);
    }
    expect(TokenKind::LParen);
    if (at(TokenKind::RParen)) arity(head, "missing input array");

    ArrayExpr out;
    if (op == "scan") {
      ArrayScan n{parse_dataset()};
      if (at(TokenKind::Comma)) arity(head, "takes exactly one argument");
      out.node = std::move(n);
    } else if (op == "project") {
      ArrayProject n{parse_dataset(), {}};
      while (accept(TokenKind::Comma)) n.attributes.push_back(identifier("attribute name"));
      if (n.attributes.empty()) arity(head, "needs at least one attribute");
      out.node = std::move(n);
    } else if (op == "filter") {
      ArrayFilter n{parse_dataset(), {}};
      if (!accept(TokenKind::Comma)) arity(head, "takes an array and a predicate");
      n.predicate = parse_expr(false);
      if (at(TokenKind::Comma)) arity(head, "takes an array and a predicate");
      out.node = std::move(n);
    } else if (op == "aggregate") {
      out.node = parse_aggregate(head);
    } else if (op == "apply") {
      ArrayApply n{parse_dataset(), {}};
      while (accept(TokenKind::Comma)) {
        std::string name = identifier("attribute name");
        if (!accept(TokenKind::Comma)) arity(head, "expects name, expression pairs");
        n.columns.emplace_back(std::move(name), parse_expr(false));
      }
      if (n.columns.empty()) arity(head, "needs at least one name, expression pair");
      out.node = std::move(n);
    } else if (op == "cross_join") {
      ArrayCrossJoin n;
      n.left = parse_dataset();
      if (accept_keyword("as")) n.left_alias = identifier("alias");
      if (!accept(TokenKind::Comma)) arity(head, "takes two arrays");
      n.right = parse_dataset();
      if (accept_keyword("as")) n.right_alias = identifier("alias");
      while (accept(TokenKind::Comma)) {
        DimRef l = parse_dim_ref();
        if (!accept(TokenKind::Comma)) arity(head, "dimensions must come in pairs");
        n.pairs.emplace_back(std::move(l), parse_dim_ref());
      }
      out.node = std::move(n);
    } else if (op == "redimension") {
      ArrayRedimension n;
      n.input = parse_dataset();
      if (!accept(TokenKind::Comma)) arity(head, "takes an array and a target schema");
      if (at(TokenKind::String) || at(TokenKind::Lt)) {
        const auto [text, offset] = raw_schema();
        try {
          n.target = parse_array_schema(text);
        } catch (const Error& e) {
          throw Error(e.code(), strip_prefix(e.what()), offset + e.offset().value_or(0));
        }
      } else {
        n.target = qualified_name("array name or schema");
      }
      if (at(TokenKind::Comma)) arity(head, "takes an array and a target schema");
      out.node = std::move(n);
    } else {
      ArraySort n{parse_dataset(), {}};
      while (accept(TokenKind::Comma)) n.attributes.push_back(identifier("attribute name"));
      out.node = std::move(n);
    }
    expect(TokenKind::RParen);
    return out;
  }

  ArrayAggregate parse_aggregate(const Token& head) {
    ArrayAggregate n;
    n.input = parse_dataset();
    while (accept(TokenKind::Comma)) {
      const Token t = peek();
      if (t.kind == TokenKind::Ident && at(TokenKind::LParen, 1)) {
        if (!n.group_dims.empty()) fail_expected("dimension name");
        const std::string fn = to_lower(take().text);
        if (!is_aggregate_function(fn)) {
          throw Error(ErrorCode::SyntaxError, "unknown aggregate '" + t.text + "'", t.offset);
        }
        expect(TokenKind::LParen);
        AggregateCall call;
        call.function = fn;
        if (at(TokenKind::Star)) {
          if (fn != "count") fail_expected("attribute name");
          take();
        } else {
          call.attribute = identifier("attribute name");
        }
        expect(TokenKind::RParen);
        if (accept_keyword("as")) call.alias = identifier("alias");
        n.calls.push_back(std::move(call));
      } else {
        n.group_dims.push_back(identifier("dimension name"));
      }
    }
    if (n.calls.empty()) arity(head, "needs at least one aggregate call");
    return n;
  }

  DimRef parse_dim_ref() {
    DimRef r;
    std::string first = identifier("dimension name");
    if (accept(TokenKind::Dot)) {
      r.qualifier = std::move(first);
      r.name = identifier("dimension name");
    } else {
      r.name = std::move(first);
    }
    return r;
  }

  // ---- text --------------------------------------------------------------

  std::string quoted_text(std::string_view what) {
    if (at(TokenKind::QuotedIdent)) {
      throw Error(ErrorCode::SyntaxError,
                  "text island queries use single quotes for labels and entries", peek().offset);
    }
    return expect(TokenKind::String, what).text;
  }

  TextQuery parse_text_object() {
    TextQuery q;
    expect(TokenKind::LBrace);
    std::set<std::string> seen;
    bool has_op = false;
    bool has_table = false;
    if (!at(TokenKind::RBrace)) {
      do {
        const Token key_tok = peek();
        const std::string key = quoted_text("quoted key");
        if (!seen.insert(key).second) {
          throw Error(ErrorCode::SyntaxError, "duplicate key '" + key + "'", key_tok.offset);
        }
        expect(TokenKind::Colon);
        if (key == "op") {
          const Token op_tok = peek();
          const std::string op = to_lower(quoted_text("text operator"));
          if (op == "scan") {
            q.op = TextOp::Scan;
          } else if (op == "range") {
            q.op = TextOp::Range;
          } else {
            throw Error(ErrorCode::UnknownTextOperator, "unknown text operator '" + op + "'",
                        op_tok.offset);
          }
          has_op = true;
        } else if (key == "table") {
          const Token& t = peek();
          if (t.kind == TokenKind::Ident && at(TokenKind::LParen, 1)) {
            if (iequals(t.text, "bdcast")) {
              q.table = parse_cast();
            } else {
              reject_function_token(t);
            }
          } else {
            q.table = quoted_text("table name");
          }
          has_table = true;
        } else if (key == "range") {
          q.range = parse_text_range();
        } else {
          throw Error(ErrorCode::SyntaxError, "unknown key '" + key + "'", key_tok.offset);
        }
      } while (accept(TokenKind::Comma));
    }
    const std::size_t close = peek().offset;
    expect(TokenKind::RBrace);
    if (!has_op) throw Error(ErrorCode::MissingKey, "missing key 'op'", close);
    if (!has_table) throw Error(ErrorCode::MissingKey, "missing key 'table'", close);
    if (q.op == TextOp::Range && !q.range) {
      throw Error(ErrorCode::MissingKey, "missing key 'range'", close);
    }
    return q;
  }

  TextRange parse_text_range() {
    TextRange r;
    expect(TokenKind::LBrace);
    if (!at(TokenKind::RBrace)) {
      do {
        const Token key_tok = peek();
        const std::string key = quoted_text("'start' or 'end'");
        expect(TokenKind::Colon);
        TextBound bound = parse_text_bound();
        if (key == "start" && !r.start) {
          r.start = std::move(bound);
        } else if (key == "end" && !r.end) {
          r.end = std::move(bound);
        } else {
          throw Error(ErrorCode::SyntaxError, "unexpected range key '" + key + "'",
                      key_tok.offset);
        }
      } while (accept(TokenKind::Comma));
    }
    expect(TokenKind::RBrace);
    return r;
  }

  TextBound parse_text_bound() {
    TextBound b;
    expect(TokenKind::LBracket);
    b.row = quoted_text("row label");
    expect(TokenKind::Comma);
    b.colfam = quoted_text("column family label");
    expect(TokenKind::Comma);
    b.colqual = quoted_text("column qualifier label");
    expect(TokenKind::RBracket);
    return b;
  }

 private:
  std::string_view source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  bool allow_aggregates_ = false;
};

std::vector<Token> schema_tokens(std::string_view text) {
  try {
    return tokenize(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaSyntaxError, "malformed schema", e.offset());
  }
}

[[noreturn]] void schema_error(const Token& t, std::string_view expected) {
  throw Error(ErrorCode::SchemaSyntaxError,
              "expected " + std::string(expected) + ", found " +
                  (t.kind == TokenKind::End ? std::string("end of schema") : "'" + t.text + "'"),
              t.offset);
}

class SchemaCursor {
 public:
  explicit SchemaCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  Token take() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool accept(TokenKind k) {
    if (peek().kind != k) return false;
    take();
    return true;
  }
  Token expect(TokenKind k, std::string_view what) {
    if (peek().kind != k) schema_error(peek(), what);
    return take();
  }
  std::int64_t integer(std::string_view what) {
    const bool negative = accept(TokenKind::Minus);
    const Token t = expect(TokenKind::Integer, what);
    try {
      return integer_value(integer_magnitude(t), negative, t.offset).as_int64();
    } catch (const Error&) {
      throw Error(ErrorCode::SchemaSyntaxError, "integer out of range", t.offset);
    }
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Ast parse(std::string_view text) {
  Parser p(text, tokenize(text));
  return p.parse_query();
}

RelationalSelect parse_relational_body(std::string_view text) {
  Parser p(text, tokenize(text));
  RelationalSelect s = p.parse_select();
  p.expect_end();
  return s;
}

ArrayExpr parse_array_body(std::string_view text) {
  Parser p(text, tokenize(text));
  ArrayExpr e = p.parse_array_top();
  p.expect_end();
  return e;
}

TextQuery parse_text_body(std::string_view text) {
  Parser p(text, tokenize(text));
  TextQuery q = p.parse_text_object();
  p.expect_end();
  return q;
}

ArraySchema parse_array_schema(std::string_view text) {
  SchemaCursor c(schema_tokens(text));
  ArraySchema schema;
  std::set<std::string> names;
  auto claim = [&](const Token& t) {
    if (!names.insert(t.text).second) {
      throw Error(ErrorCode::DuplicateName, "duplicate name '" + t.text + "' in schema",
                  t.offset);
    }
  };

  c.expect(TokenKind::Lt, "'<'");
  do {
    const Token name = c.expect(TokenKind::Ident, "attribute name");
    c.expect(TokenKind::Colon, "':'");
    const Token type_tok = c.expect(TokenKind::Ident, "attribute type");
    const std::string type_name = to_lower(type_tok.text);
    static const std::set<std::string> kArrayTypes = {"int32", "int64",  "float",
                                                      "double", "string", "bool"};
    if (!kArrayTypes.count(type_name)) {
      throw Error(ErrorCode::SchemaSyntaxError, "unknown attribute type '" + type_tok.text + "'",
                  type_tok.offset);
    }
    claim(name);
    schema.attributes.push_back({name.text, *parse_scalar_type(type_name)});
  } while (c.accept(TokenKind::Comma));
  c.expect(TokenKind::Gt, "'>'");

  c.expect(TokenKind::LBracket, "'['");
  do {
    const Token name = c.expect(TokenKind::Ident, "dimension name");
    c.expect(TokenKind::Eq, "'='");
    DimensionDesc dim;
    dim.name = name.text;
    const Token low_tok = c.peek();
    dim.low = c.integer("lower bound");
    c.expect(TokenKind::Colon, "':'");
    if (!c.accept(TokenKind::Star)) dim.high = c.integer("upper bound or '*'");
    if (c.peek().kind == TokenKind::Comma &&
        (c.peek(1).kind == TokenKind::Integer || c.peek(1).kind == TokenKind::Minus)) {
      c.take();
      const Token chunk_tok = c.peek();
      dim.chunk = c.integer("chunk length");
      if (dim.chunk <= 0) {
        throw Error(ErrorCode::BadBounds, "chunk length must be positive", chunk_tok.offset);
      }
      if (c.peek().kind == TokenKind::Comma &&
          (c.peek(1).kind == TokenKind::Integer || c.peek(1).kind == TokenKind::Minus)) {
        c.take();
        const Token overlap_tok = c.peek();
        dim.overlap = c.integer("chunk overlap");
        if (dim.overlap < 0) {
          throw Error(ErrorCode::BadBounds, "chunk overlap must be non-negative",
                      overlap_tok.offset);
        }
      }
    }
    if (dim.high && dim.low > *dim.high) {
      throw Error(ErrorCode::BadBounds,
                  "dimension '" + dim.name + "' has low bound above high bound", low_tok.offset);
    }
    claim(name);
    schema.dimensions.push_back(std::move(dim));
  } while (c.accept(TokenKind::Comma));
  c.expect(TokenKind::RBracket, "']'");
  c.expect(TokenKind::End, "end of schema");
  return schema;
}

RelationalSchema parse_relational_schema(std::string_view text) {
  SchemaCursor c(schema_tokens(text));
  RelationalSchema schema;
  std::set<std::string> names;
  c.expect(TokenKind::LParen, "'('");
  do {
    const Token name = c.peek();
    if (name.kind != TokenKind::Ident && name.kind != TokenKind::QuotedIdent) {
      schema_error(name, "column name");
    }
    c.take();
    const Token type_tok = c.expect(TokenKind::Ident, "column type");
    std::string type_name = to_lower(type_tok.text);
    if (type_name == "double" && c.peek().kind == TokenKind::Ident &&
        iequals(c.peek().text, "precision")) {
      c.take();
    }
    if (c.accept(TokenKind::LParen)) {  // varchar(20)
      c.expect(TokenKind::Integer, "type length");
      c.expect(TokenKind::RParen, "')'");
    }
    const auto type = parse_scalar_type(type_name);
    if (!type) {
      throw Error(ErrorCode::SchemaSyntaxError, "unknown column type '" + type_tok.text + "'",
                  type_tok.offset);
    }
    if (!names.insert(name.text).second) {
      throw Error(ErrorCode::DuplicateName, "duplicate column '" + name.text + "'", name.offset);
    }
    schema.columns.push_back({name.text, *type});
  } while (c.accept(TokenKind::Comma));
  c.expect(TokenKind::RParen, "')'");
  c.expect(TokenKind::End, "end of schema");
  return schema;
}

TextSchema parse_text_schema(std::string_view text) {
  SchemaCursor c(schema_tokens(text));
  const Token name = c.peek();
  if (name.kind != TokenKind::Ident && name.kind != TokenKind::QuotedIdent) {
    schema_error(name, "key column name");
  }
  c.take();
  c.expect(TokenKind::End, "end of schema");
  return TextSchema{name.text};
}

}  // namespace polydawg::bql
