#include "polydawg/planner/plan.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "polydawg/error.hpp"
#include "polydawg/island/island.hpp"

namespace polydawg {

using bql::Island;

namespace {

int build(const bql::IslandQuery& q, CrossIslandQueryPlan& plan, std::set<std::string>& names) {
  const int id = static_cast<int>(plan.nodes.size());
  plan.nodes.push_back(PlanNode{PlanNode::Kind::Query, q, {}, -1, {}, Island::Relational, {}});
  for (const auto* cast : bql::direct_casts(q)) {
    if (cast->dest_island != q.island()) {
      throw Error(ErrorCode::MisplacedCast, "cast into the " +
                                                std::string(to_string(cast->dest_island)) +
                                                " island used inside a " +
                                                std::string(to_string(q.island())) + " query");
    }
    if (!names.insert(cast->intermediate_name).second) {
      throw Error(ErrorCode::PlanningError,
                  "intermediate '" + cast->intermediate_name + "' is defined twice");
    }
    const int child = build(*cast->inner, plan, names);
    const int mig = static_cast<int>(plan.nodes.size());
    PlanNode m;
    m.kind = PlanNode::Kind::Migration;
    m.child = child;
    m.intermediate = cast->intermediate_name;
    m.dest_island = cast->dest_island;
    m.dest_schema = cast->dest_schema;
    plan.nodes.push_back(std::move(m));
    plan.nodes[id].inputs.push_back(mig);
  }
  return id;
}

std::vector<int> topological(const CrossIslandQueryPlan& plan) {
  std::vector<int> out;
  std::function<void(int)> visit = [&](int n) {
    const auto& node = plan.nodes[n];
    if (node.kind == PlanNode::Kind::Migration) {
      visit(node.child);
    } else {
      for (int m : node.inputs) visit(m);
    }
    out.push_back(n);
  };
  visit(plan.root);
  return out;
}

}  // namespace

CrossIslandQueryPlan build_plan(const bql::IslandQuery& query) {
  CrossIslandQueryPlan plan;
  std::set<std::string> names;
  plan.root = build(query, plan, names);
  plan.schedule = topological(plan);
  return plan;
}

std::optional<std::size_t> argmin_plan(const std::vector<std::optional<double>>& timings) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < timings.size(); ++i) {
    if (!timings[i]) return std::nullopt;
    if (!best || *timings[i] < *timings[*best]) best = i;
  }
  return best;
}

std::vector<QueryExecutionPlan> enumerate_plans(const CrossIslandQueryPlan& plan,
                                                const catalog::Catalog& catalog,
                                                const std::string& scratch_suffix) {
  std::vector<int> queries;
  for (int n : plan.schedule) {
    if (plan.nodes[n].kind == PlanNode::Kind::Query) queries.push_back(n);
  }
  std::vector<std::vector<int>> cands;
  std::vector<std::vector<std::vector<int>>> perms;
  for (int q : queries) {
    cands.push_back(island::candidate_engines(plan.nodes[q].body, catalog));
    std::vector<int> inputs = plan.nodes[q].inputs;
    std::vector<std::vector<int>> all;
    do {
      all.push_back(inputs);
    } while (all.size() < kMaxPlans && std::next_permutation(inputs.begin(), inputs.end()));
    perms.push_back(std::move(all));
  }
  auto total = [](const auto& lists) {
    std::size_t n = 1;
    for (const auto& l : lists) n = std::min<std::size_t>(n * l.size(), 1u << 20);
    return n;
  };
  const std::size_t placements = total(cands);
  const std::size_t orderings = total(perms);

  std::vector<int> engine_of(plan.nodes.size(), -1);
  std::vector<const std::vector<int>*> order_of(plan.nodes.size(), nullptr);
  auto engine_name = [&](int id) {
    auto e = catalog.engine(id);
    return e ? e->name : std::to_string(id);
  };

  std::vector<QueryExecutionPlan> out;
  for (std::size_t o = 0; o < orderings && out.size() < kMaxPlans; ++o) {
    std::size_t rest = o;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      order_of[queries[i]] = &perms[i][rest % perms[i].size()];
      rest /= perms[i].size();
    }
    for (std::size_t p = 0; p < placements && out.size() < kMaxPlans; ++p) {
      rest = p;
      for (std::size_t i = 0; i < queries.size(); ++i) {
        engine_of[queries[i]] = cands[i][rest % cands[i].size()];
        rest /= cands[i].size();
      }
      bool viable = true;
      for (int q : queries) {
        for (int m : plan.nodes[q].inputs) {
          const int src = engine_of[plan.nodes[m].child];
          const int dst = engine_of[q];
          viable = viable && (src == dst || catalog.cast_between(src, dst).has_value());
        }
      }
      if (!viable) continue;

      QueryExecutionPlan qep;
      std::function<int(int)> visit = [&](int q) -> int {
        const auto& node = plan.nodes[q];
        const int engine = engine_of[q];
        QepStep step;
        step.kind = QepStep::Kind::Query;
        step.engine_id = engine;
        step.body = node.body;
        for (int m : *order_of[q]) {
          const auto& mig = plan.nodes[m];
          const int child_step = visit(mig.child);
          QepStep move;
          move.kind = QepStep::Kind::Migration;
          move.engine_id = engine;
          move.source_step = child_step;
          move.source_engine = engine_of[mig.child];
          move.source_kind = plan.nodes[mig.child].body.island();
          move.dest_kind = mig.dest_island;
          move.dest_object = mig.intermediate + scratch_suffix;
          move.schema = mig.dest_schema;
          move.deps = {child_step};
          const int id = static_cast<int>(qep.steps.size());
          qep.steps.push_back(std::move(move));
          qep.order.push_back(id);
          step.bindings[mig.intermediate] = qep.steps[id].dest_object;
          step.deps.push_back(id);
        }
        for (const auto& name : bql::referenced_objects(node.body)) {
          const auto homes = catalog.placements(name);
          const bool local = std::any_of(homes.begin(), homes.end(), [&](const auto& pl) {
            return pl.engine.engine_id == engine;
          });
          if (local || step.bindings.count(name)) continue;
          auto source = std::find_if(homes.begin(), homes.end(), [&](const auto& pl) {
            return pl.island == node.body.island() &&
                   catalog.cast_between(pl.engine.engine_id, engine).has_value();
          });
          if (source == homes.end()) {
            throw Error(ErrorCode::NoCandidateEngine, "object '" + name + "' cannot reach engine " +
                                                          std::to_string(engine));
          }
          QepStep import;
          import.kind = QepStep::Kind::Migration;
          import.engine_id = engine;
          import.source_object = name;
          import.source_engine = source->engine.engine_id;
          import.source_kind = source->island;
          import.dest_kind = node.body.island();
          import.dest_object = name + "#n" + std::to_string(q) + scratch_suffix;
          const int id = static_cast<int>(qep.steps.size());
          qep.steps.push_back(std::move(import));
          qep.order.push_back(id);
          step.bindings[name] = qep.steps[id].dest_object;
          step.deps.push_back(id);
        }
        const int id = static_cast<int>(qep.steps.size());
        qep.steps.push_back(std::move(step));
        qep.order.push_back(id);
        return id;
      };
      qep.root = visit(plan.root);

      std::string id;
      for (int q : queries) {
        if (!id.empty()) id += ' ';
        id += "n" + std::to_string(q) + "@" + engine_name(engine_of[q]);
        if (order_of[q]->size() > 1) {
          id += "<";
          for (std::size_t i = 0; i < order_of[q]->size(); ++i) {
            id += (i ? "," : "") + std::to_string((*order_of[q])[i]);
          }
          id += ">";
        }
      }
      qep.id = id;
      out.push_back(std::move(qep));
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::NoCandidateEngine, "no engine placement has the casts this query needs");
  }
  return out;
}

}  // namespace polydawg
