#include "polydawg/island/island.hpp"

#include <chrono>
#include <mutex>

#include "polydawg/error.hpp"

namespace polydawg::island {

using bql::Island;

const std::vector<std::string>& operations(Island island) {
  static const std::vector<std::string> relational = {"select", "filter", "join", "aggregate",
                                                      "sort", "limit", "distinct"};
  static const std::vector<std::string> array = {"scan",  "project",    "filter",      "aggregate",
                                                 "apply", "cross_join", "redimension", "sort"};
  static const std::vector<std::string> text = {"scan", "range"};
  switch (island) {
    case Island::Relational: return relational;
    case Island::Array: return array;
    case Island::Text: break;
  }
  return text;
}

void EngineRegistry::add(int engine_id, std::shared_ptr<engines::StorageEngine> engine) {
  std::unique_lock lock(mutex_);
  engines_[engine_id] = std::move(engine);
}

std::shared_ptr<engines::StorageEngine> EngineRegistry::get(int engine_id) const {
  std::shared_lock lock(mutex_);
  auto it = engines_.find(engine_id);
  if (it == engines_.end()) {
    throw Error(ErrorCode::UnknownEngine, "no running engine with id " + std::to_string(engine_id));
  }
  return it->second;
}

bool EngineRegistry::contains(int engine_id) const {
  std::shared_lock lock(mutex_);
  return engines_.count(engine_id) != 0;
}

std::vector<int> EngineRegistry::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<int> out;
  for (const auto& [id, _] : engines_) out.push_back(id);
  return out;
}

void attach_engines(const catalog::Catalog& catalog, EngineRegistry& registry) {
  for (const auto& e : catalog.snapshot().engines) {
    if (registry.contains(e.engine_id)) continue;
    if (auto island = catalog.island_of(e.engine_id)) {
      registry.add(e.engine_id, engines::make_engine(*island));
    }
  }
}

std::vector<int> candidate_engines(const bql::IslandQuery& fragment,
                                   const catalog::Catalog& catalog) {
  std::vector<std::vector<catalog::Placement>> needed;
  for (const auto& name : bql::referenced_objects(fragment)) {
    auto placements = catalog.placements(name);
    if (placements.empty()) {
      catalog.resolve_object(name);  // raises UnknownObject or NoShim
      throw Error(ErrorCode::UnknownObject, "unknown object '" + name + "'");
    }
    needed.push_back(std::move(placements));
  }
  std::vector<int> out;
  for (int engine : catalog.island_engines(fragment.island())) {
    bool ok = true;
    for (const auto& placements : needed) {
      bool reachable = false;
      for (const auto& p : placements) {
        if (p.engine.engine_id == engine ||
            (p.island == fragment.island() && catalog.cast_between(p.engine.engine_id, engine))) {
          reachable = true;
          break;
        }
      }
      ok = ok && reachable;
    }
    if (ok) out.push_back(engine);
  }
  if (out.empty()) {
    throw Error(ErrorCode::NoCandidateEngine,
                "no " + std::string(to_string(fragment.island())) +
                    " engine holds or can receive every referenced object");
  }
  return out;
}

ResultSet execute_on(const catalog::Catalog& catalog, const EngineRegistry& registry,
                     int engine_id, const bql::IslandQuery& body,
                     const engines::Bindings& bindings) {
  const auto island = catalog.island_of(engine_id);
  if (!island || *island != body.island()) {
    throw Error(ErrorCode::ShimUnsupported,
                "engine " + std::to_string(engine_id) + " has no shim for the " +
                    std::string(to_string(body.island())) + " island");
  }
  auto engine = registry.get(engine_id);
  const auto start = std::chrono::steady_clock::now();
  ResultSet out;
  try {
    out = engine->execute(body, bindings);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ShimUnsupported) throw;
    throw Error(ErrorCode::EngineFailure, e.what()).with_cause(e.code());
  }
  out.engine_id = engine_id;
  out.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace polydawg::island
