#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/catalog/catalog.hpp"
#include "polydawg/engines/engine.hpp"

namespace polydawg::island {

/// Operators each island exposes.
const std::vector<std::string>& operations(bql::Island island);

/// Live engine instances keyed by catalog engine id.
class EngineRegistry {
 public:
  void add(int engine_id, std::shared_ptr<engines::StorageEngine> engine);
  std::shared_ptr<engines::StorageEngine> get(int engine_id) const;
  bool contains(int engine_id) const;
  std::vector<int> ids() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<int, std::shared_ptr<engines::StorageEngine>> engines_;
};

/// Creates an engine instance for every shimmed catalog engine that lacks one.
void attach_engines(const catalog::Catalog& catalog, EngineRegistry& registry);

/// Engines of the fragment's island that hold every referenced catalog object
/// or can receive it through a registered cast, in shim order.
std::vector<int> candidate_engines(const bql::IslandQuery& fragment,
                                   const catalog::Catalog& catalog);

/// Runs one island body on `engine_id` through its shim. Engine errors are
/// wrapped as EngineFailure carrying the original code as cause.
ResultSet execute_on(const catalog::Catalog& catalog, const EngineRegistry& registry,
                     int engine_id, const bql::IslandQuery& body,
                     const engines::Bindings& bindings = {});

}  // namespace polydawg::island
