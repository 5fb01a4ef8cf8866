#pragma once

#include <memory>
#include <string>

#include "polydawg/catalog/catalog.hpp"
#include "polydawg/executor/executor.hpp"
#include "polydawg/island/island.hpp"
#include "polydawg/migrator/migrator.hpp"
#include "polydawg/monitor/monitor.hpp"
#include "polydawg/planner/planner.hpp"

namespace polydawg {

/// One middleware instance: catalog, live engines, migrator, monitor,
/// executor and planner wired together.
class Polystore {
 public:
  explicit Polystore(std::size_t workers = 4);
  Polystore(const Polystore&) = delete;
  Polystore& operator=(const Polystore&) = delete;

  Response query(const std::string& text, bool is_training = false) {
    return planner_.process_query(text, is_training);
  }

  /// Creates engine instances for shimmed catalog engines that have none.
  void attach_engines() { island::attach_engines(catalog_, registry_); }

  /// Writes the catalog and monitor history to `path`.
  void save(const std::string& path) const;
  /// Restores the catalog and monitor history from `path` and attaches engines.
  void open(const std::string& path);

  catalog::Catalog& catalog() { return catalog_; }
  const catalog::Catalog& catalog() const { return catalog_; }
  island::EngineRegistry& registry() { return registry_; }
  migration::Migrator& migrator() { return migrator_; }
  monitor::Monitor& monitor() { return monitor_; }
  Executor& executor() { return executor_; }
  Planner& planner() { return planner_; }

 private:
  catalog::Catalog catalog_;
  island::EngineRegistry registry_;
  migration::Migrator migrator_;
  monitor::Monitor monitor_;
  Executor executor_;
  Planner planner_;
};

}  // namespace polydawg
