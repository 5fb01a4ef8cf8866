#include "polydawg/bql/render.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "polydawg/text_util.hpp"

namespace polydawg::bql {
namespace {

bool needs_quoting(std::string_view name) {
  static const std::unordered_set<std::string_view> kWords = {
      "select", "from",  "where",  "group", "order", "by",    "limit",  "as",
      "and",    "or",    "not",    "is",    "null",  "true",  "false",  "distinct",
      "asc",    "desc",  "having", "union", "join",  "on",    "offset", "inner",
      "left",   "right", "outer",  "cross", "full",  "natural", "except", "intersect"};
  if (name.empty()) return true;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return true;
  const bool plain = std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
  if (!plain) return true;
  if (name.size() > 9) return false;
  char lower[9];
  for (std::size_t i = 0; i < name.size(); ++i) {
    lower[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(name[i])));
  }
  return kWords.count(std::string_view(lower, name.size())) > 0;
}

std::string ident(std::string_view name) {
  if (!needs_quoting(name)) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Dotted names render part by part.
std::string dotted(std::string_view name) {
  std::vector<std::string> parts = split(name, '.');
  for (auto& p : parts) p = ident(p);
  return join(parts, ".");
}

std::string literal(const Value& v, const RenderOptions& opt) {
  if (opt.strip_literals) return "?";
  if (v.is_null()) return "NULL";
  if (v.is_bool()) return v.as_bool() ? "TRUE" : "FALSE";
  if (v.is_integer()) return std::to_string(v.as_int64());
  if (v.is_double()) {
    std::string s = format_double(v.as_double());
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }
  return quote(v.as_string());
}

class Renderer {
 public:
  explicit Renderer(const RenderOptions& opt) : opt_(opt) {}

  std::string expr(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Literal: return literal(e.literal, opt_);
      case Expr::Kind::Column:
        return e.qualifier.empty() ? ident(e.name) : dotted(e.qualifier) + "." + ident(e.name);
      case Expr::Kind::Star: return "*";
      case Expr::Kind::Unary:
        if (e.name == "NOT") return "(NOT " + expr(e.args[0]) + ")";
        return e.name + "(" + expr(e.args[0]) + ")";
      case Expr::Kind::Binary:
        return "(" + expr(e.args[0]) + " " + e.name + " " + expr(e.args[1]) + ")";
      case Expr::Kind::Call: {
        std::vector<std::string> args;
        for (const auto& a : e.args) args.push_back(expr(a));
        return e.name + "(" + join(args, ", ") + ")";
      }
      case Expr::Kind::IsNull:
        return "(" + expr(e.args[0]) + (e.negated ? " IS NOT NULL)" : " IS NULL)");
    }
    return {};
  }

  std::string source(const ObjectSource& s) const {
    if (const auto* cast = std::get_if<CastLeaf>(&s)) return this->cast(*cast);
    return dotted(std::get<std::string>(s));
  }

  std::string cast(const CastLeaf& c) const {
    return "bdcast(" + island(*c.inner) + ", " + ident(c.intermediate_name) + ", " +
           quote(render(c.dest_schema)) + ", " + std::string(to_string(c.dest_island)) + ")";
  }

  std::string select(const RelationalSelect& s) const {
    std::string out = "SELECT ";
    if (s.distinct) out += "DISTINCT ";
    if (s.star) {
      out += "*";
    } else {
      std::vector<std::string> items;
      for (const auto& item : s.projections) {
        std::string text = expr(item.expr);
        if (item.alias) text += " AS " + ident(*item.alias);
        items.push_back(std::move(text));
      }
      out += join(items, ", ");
    }
    std::vector<std::string> from;
    for (const auto& item : s.from) {
      std::string text = source(item.source);
      if (item.alias) text += " AS " + ident(*item.alias);
      from.push_back(std::move(text));
    }
    out += " FROM " + join(from, ", ");
    if (s.where) out += " WHERE " + expr(*s.where);
    if (!s.group_by.empty()) {
      std::vector<std::string> keys;
      for (const auto& k : s.group_by) keys.push_back(expr(k));
      out += " GROUP BY " + join(keys, ", ");
    }
    if (!s.order_by.empty()) {
      std::vector<std::string> keys;
      for (const auto& k : s.order_by) keys.push_back(expr(k.expr) + (k.descending ? " DESC" : ""));
      out += " ORDER BY " + join(keys, ", ");
    }
    if (s.limit) out += " LIMIT " + (opt_.strip_literals ? std::string("?") : std::to_string(*s.limit));
    return out;
  }

  std::string names(const std::vector<std::string>& list) const {
    std::string out;
    for (const auto& n : list) out += ", " + ident(n);
    return out;
  }

  std::string array(const ArrayExpr& a) const {
    return std::visit(
        Overloaded{
            [&](const ArrayRef& n) { return source(n.source); },
            [&](const ArrayScan& n) { return "scan(" + array(*n.input) + ")"; },
            [&](const ArrayProject& n) {
              return "project(" + array(*n.input) + names(n.attributes) + ")";
            },
            [&](const ArrayFilter& n) {
              return "filter(" + array(*n.input) + ", " + expr(n.predicate) + ")";
            },
            [&](const ArrayAggregate& n) {
              std::string out = "aggregate(" + array(*n.input);
              for (const auto& c : n.calls) {
                out += ", " + c.function + "(" + (c.attribute ? ident(*c.attribute) : "*") + ")";
                if (c.alias) out += " AS " + ident(*c.alias);
              }
              return out + names(n.group_dims) + ")";
            },
            [&](const ArrayApply& n) {
              std::string out = "apply(" + array(*n.input);
              for (const auto& [name, e] : n.columns) out += ", " + ident(name) + ", " + expr(e);
              return out + ")";
            },
            [&](const ArrayCrossJoin& n) {
              std::string out = "cross_join(" + array(*n.left);
              if (n.left_alias) out += " AS " + ident(*n.left_alias);
              out += ", " + array(*n.right);
              if (n.right_alias) out += " AS " + ident(*n.right_alias);
              auto dim = [](const DimRef& d) {
                return d.qualifier.empty() ? ident(d.name) : ident(d.qualifier) + "." + ident(d.name);
              };
              for (const auto& [l, r] : n.pairs) out += ", " + dim(l) + ", " + dim(r);
              return out + ")";
            },
            [&](const ArrayRedimension& n) {
              std::string target;
              if (const auto* name = std::get_if<std::string>(&n.target)) {
                target = dotted(*name);
              } else {
                target = quote(render(std::get<ArraySchema>(n.target)));
              }
              return "redimension(" + array(*n.input) + ", " + target + ")";
            },
            [&](const ArraySort& n) {
              return "sort(" + array(*n.input) + names(n.attributes) + ")";
            },
        },
        a.node);
  }

  std::string label(const std::string& s) const { return opt_.strip_literals ? "'?'" : quote(s); }

  std::string bound(const TextBound& b) const {
    return "[" + label(b.row) + ", " + label(b.colfam) + ", " + label(b.colqual) + "]";
  }

  std::string text(const TextQuery& q) const {
    std::string out = "{ 'op' : " + quote(to_string(q.op)) + ", 'table' : ";
    if (const auto* cast = std::get_if<CastLeaf>(&q.table)) {
      out += this->cast(*cast);
    } else {
      out += quote(std::get<std::string>(q.table));
    }
    if (q.range) {
      std::vector<std::string> parts;
      if (q.range->start) parts.push_back("'start' : " + bound(*q.range->start));
      if (q.range->end) parts.push_back("'end' : " + bound(*q.range->end));
      out += ", 'range' : { " + join(parts, ", ") + (parts.empty() ? "}" : " }");
    }
    return out + " }";
  }

  std::string island(const IslandQuery& q) const {
    return std::visit(Overloaded{
                          [&](const RelationalSelect& s) { return "bdrel(" + select(s) + ")"; },
                          [&](const ArrayExpr& a) { return "bdarray(" + array(a) + ")"; },
                          [&](const TextQuery& t) { return "bdtext(" + text(t) + ")"; },
                      },
                      q.body);
  }

  std::string catalog(const CatalogQuery& q) const {
    if (q.filter) {
      std::string cols = q.columns.empty() ? "*" : "";
      for (std::size_t i = 0; i < q.columns.size(); ++i) {
        cols += (i ? ", " : "") + ident(q.columns[i]);
      }
      return "bdcatalog(SELECT " + cols + " FROM " + ident(q.table) + " WHERE " +
             ident(q.filter->column) + " = " + literal(q.filter->value, opt_) + ")";
    }
    return "bdcatalog(" + ident(q.table) + names(q.columns) + ")";
  }

 private:
  const RenderOptions& opt_;
};

}  // namespace

std::string quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

std::string render(const Ast& ast, const RenderOptions& options) {
  Renderer r(options);
  if (const auto* c = std::get_if<CatalogQuery>(&ast.node)) return r.catalog(*c);
  return r.island(std::get<IslandQuery>(ast.node));
}

std::string render(const IslandQuery& query, const RenderOptions& options) {
  return Renderer(options).island(query);
}

std::string render(const Expr& expr, const RenderOptions& options) {
  return Renderer(options).expr(expr);
}

std::string render(const ArraySchema& schema) {
  std::vector<std::string> attrs;
  for (const auto& a : schema.attributes) {
    attrs.push_back(a.name + ":" + std::string(to_string(a.type)));
  }
  std::vector<std::string> dims;
  for (const auto& d : schema.dimensions) {
    dims.push_back(d.name + "=" + std::to_string(d.low) + ":" +
                   (d.high ? std::to_string(*d.high) : "*") + "," + std::to_string(d.chunk) + "," +
                   std::to_string(d.overlap));
  }
  return "<" + join(attrs, ",") + ">[" + join(dims, ",") + "]";
}

std::string render(const RelationalSchema& schema) {
  std::vector<std::string> cols;
  for (const auto& c : schema.columns) {
    cols.push_back(ident(c.name) + " " + std::string(to_string(c.type)));
  }
  return "(" + join(cols, ", ") + ")";
}

std::string render(const DestSchema& schema) {
  return std::visit(Overloaded{
                        [](const RelationalSchema& s) { return render(s); },
                        [](const ArraySchema& s) { return render(s); },
                        [](const TextSchema& s) { return ident(s.key_column); },
                    },
                    schema);
}

}  // namespace polydawg::bql
