#include "polydawg/planner/signature.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "polydawg/bql/parser.hpp"
#include "polydawg/bql/render.hpp"
#include "polydawg/error.hpp"

namespace polydawg {

using namespace bql;

std::size_t Skeleton::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

namespace {

class SkeletonBuilder {
 public:
  std::vector<std::string> islands;
  std::set<std::string> objects;
  std::vector<std::string> literals;

  Skeleton query(const IslandQuery& q) {
    islands.emplace_back(to_string(q.island()));
    return std::visit(Overloaded{
                          [&](const RelationalSelect& s) { return node("bdrel", {select(s)}); },
                          [&](const ArrayExpr& a) { return node("bdarray", {array(a)}); },
                          [&](const TextQuery& t) { return node("bdtext", {text(t)}); },
                      },
                      q.body);
  }

 private:
  static Skeleton node(std::string label, std::vector<Skeleton> children = {}) {
    return Skeleton{std::move(label), std::move(children)};
  }

  void literal(const std::string& text) { literals.push_back(text); }

  Skeleton source(const ObjectSource& s) {
    if (const auto* name = std::get_if<std::string>(&s)) {
      objects.insert(*name);
      return node("object");
    }
    const auto& c = std::get<CastLeaf>(s);
    return node("bdcast", {query(*c.inner), node(render(c.dest_schema)),
                           node(std::string(to_string(c.dest_island)))});
  }

  Skeleton expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        literal(render(e));
        return node("?");
      case Expr::Kind::Column: return node("column:" + e.name);
      case Expr::Kind::Star: return node("*");
      case Expr::Kind::IsNull: return node(e.negated ? "is not null" : "is null", {expr(e.args[0])});
      default: break;
    }
    std::vector<Skeleton> args;
    for (const auto& a : e.args) args.push_back(expr(a));
    return node(e.name, std::move(args));
  }

  Skeleton select(const RelationalSelect& s) {
    std::vector<Skeleton> parts;
    if (s.distinct) parts.push_back(node("distinct"));
    std::vector<Skeleton> items;
    if (s.star) items.push_back(node("*"));
    for (const auto& p : s.projections) items.push_back(expr(p.expr));
    parts.push_back(node("projections", std::move(items)));
    std::vector<Skeleton> from;
    for (const auto& f : s.from) from.push_back(source(f.source));
    parts.push_back(node("from", std::move(from)));
    if (s.where) parts.push_back(node("where", {expr(*s.where)}));
    if (!s.group_by.empty()) {
      std::vector<Skeleton> g;
      for (const auto& e : s.group_by) g.push_back(expr(e));
      parts.push_back(node("group by", std::move(g)));
    }
    if (!s.order_by.empty()) {
      std::vector<Skeleton> o;
      for (const auto& i : s.order_by) o.push_back(node(i.descending ? "desc" : "asc", {expr(i.expr)}));
      parts.push_back(node("order by", std::move(o)));
    }
    if (s.limit) {
      literal(std::to_string(*s.limit));
      parts.push_back(node("limit"));
    }
    return node("select", std::move(parts));
  }

  static std::vector<Skeleton> names(const std::vector<std::string>& v) {
    std::vector<Skeleton> out;
    for (const auto& s : v) out.push_back(node(s));
    return out;
  }

  Skeleton array(const ArrayExpr& a) {
    return std::visit(
        Overloaded{
            [&](const ArrayRef& r) { return source(r.source); },
            [&](const ArrayScan& n) { return node("scan", {array(*n.input)}); },
            [&](const ArrayProject& n) {
              auto c = names(n.attributes);
              c.insert(c.begin(), array(*n.input));
              return node("project", std::move(c));
            },
            [&](const ArrayFilter& n) {
              return node("filter", {array(*n.input), expr(n.predicate)});
            },
            [&](const ArrayAggregate& n) {
              std::vector<Skeleton> c{array(*n.input)};
              for (const auto& call : n.calls) {
                c.push_back(node(call.function, {node(call.attribute.value_or("*"))}));
              }
              for (const auto& g : n.group_dims) c.push_back(node("group:" + g));
              return node("aggregate", std::move(c));
            },
            [&](const ArrayApply& n) {
              std::vector<Skeleton> c{array(*n.input)};
              for (const auto& [name, e] : n.columns) c.push_back(node(name, {expr(e)}));
              return node("apply", std::move(c));
            },
            [&](const ArrayCrossJoin& n) {
              std::vector<Skeleton> c{array(*n.left), array(*n.right)};
              for (const auto& [l, r] : n.pairs) c.push_back(node("pair:" + l.name + "=" + r.name));
              return node("cross_join", std::move(c));
            },
            [&](const ArrayRedimension& n) {
              Skeleton target = std::holds_alternative<ArraySchema>(n.target)
                                    ? node(render(DestSchema{std::get<ArraySchema>(n.target)}))
                                    : node("object");
              if (const auto* name = std::get_if<std::string>(&n.target)) objects.insert(*name);
              return node("redimension", {array(*n.input), std::move(target)});
            },
            [&](const ArraySort& n) {
              auto c = names(n.attributes);
              c.insert(c.begin(), array(*n.input));
              return node("sort", std::move(c));
            },
        },
        a.node);
  }

  Skeleton text(const TextQuery& t) {
    std::vector<Skeleton> c{source(t.table)};
    if (t.range) {
      for (const auto* b : {&t.range->start, &t.range->end}) {
        if (!*b) continue;
        for (const auto* part : {&(*b)->row, &(*b)->colfam, &(*b)->colqual}) literal(quote(*part));
        c.push_back(node(b == &t.range->start ? "start" : "end"));
      }
    }
    return node(std::string(to_string(t.op)), std::move(c));
  }
};

void postorder(const Skeleton& t, std::vector<const Skeleton*>& nodes, std::vector<std::size_t>& leftmost) {
  const std::size_t first = nodes.size();
  for (const auto& c : t.children) postorder(c, nodes, leftmost);
  nodes.push_back(&t);
  leftmost.push_back(t.children.empty() ? nodes.size() - 1 : leftmost[first]);
}

}  // namespace

Signature make_signature(const IslandQuery& query) {
  SkeletonBuilder b;
  Signature s;
  s.skeleton = b.query(query);
  s.text = render(query);
  s.structure = render(query, RenderOptions{true});
  s.islands = std::move(b.islands);
  s.objects.assign(b.objects.begin(), b.objects.end());
  s.literals = std::move(b.literals);
  return s;
}

Signature make_signature(const std::string& query_text) {
  const Ast ast = parse(query_text);
  if (ast.is_catalog()) throw Error(ErrorCode::PlanningError, "catalog queries have no signature");
  return make_signature(std::get<IslandQuery>(ast.node));
}

std::size_t tree_edit_distance(const Skeleton& a, const Skeleton& b) {
  std::vector<const Skeleton*> na, nb;
  std::vector<std::size_t> la, lb;
  postorder(a, na, la);
  postorder(b, nb, lb);
  auto keyroots = [](const std::vector<std::size_t>& l) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < l.size(); ++i) {
      bool last = true;
      for (std::size_t j = i + 1; j < l.size(); ++j) last = last && l[j] != l[i];
      if (last) out.push_back(i);
    }
    return out;
  };
  const std::size_t n = na.size();
  const std::size_t m = nb.size();
  std::vector<std::vector<std::size_t>> td(n, std::vector<std::size_t>(m, 0));
  std::vector<std::vector<std::size_t>> fd(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i : keyroots(la)) {
    for (std::size_t j : keyroots(lb)) {
      const std::size_t li = la[i];
      const std::size_t lj = lb[j];
      // fd indices are offset by one: fd[x - li + 1][y - lj + 1] is the forest distance.
      fd[0][0] = 0;
      for (std::size_t x = li; x <= i; ++x) fd[x - li + 1][0] = fd[x - li][0] + 1;
      for (std::size_t y = lj; y <= j; ++y) fd[0][y - lj + 1] = fd[0][y - lj] + 1;
      for (std::size_t x = li; x <= i; ++x) {
        for (std::size_t y = lj; y <= j; ++y) {
          const std::size_t dx = x - li + 1;
          const std::size_t dy = y - lj + 1;
          const std::size_t del = fd[dx - 1][dy] + 1;
          const std::size_t ins = fd[dx][dy - 1] + 1;
          if (la[x] == li && lb[y] == lj) {
            const std::size_t rel = fd[dx - 1][dy - 1] + (na[x]->label == nb[y]->label ? 0 : 1);
            fd[dx][dy] = std::min({del, ins, rel});
            td[x][y] = fd[dx][dy];
          } else {
            const std::size_t px = la[x] - li;
            const std::size_t py = lb[y] - lj;
            fd[dx][dy] = std::min({del, ins, fd[px][py] + td[x][y]});
          }
        }
      }
    }
  }
  return td[n - 1][m - 1];
}

double signature_distance(const Signature& a, const Signature& b) {
  const double size = static_cast<double>(a.skeleton.size() + b.skeleton.size());
  const double tree = static_cast<double>(tree_edit_distance(a.skeleton, b.skeleton)) / size;
  std::vector<std::string> both;
  std::set_intersection(a.objects.begin(), a.objects.end(), b.objects.begin(), b.objects.end(),
                        std::back_inserter(both));
  const std::size_t uni = a.objects.size() + b.objects.size() - both.size();
  const double jaccard = uni == 0 ? 0.0 : 1.0 - static_cast<double>(both.size()) / static_cast<double>(uni);
  return 0.7 * tree + 0.3 * jaccard;
}

}  // namespace polydawg
