#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "polydawg/catalog/catalog.hpp"
#include "polydawg/executor/qep.hpp"
#include "polydawg/executor/spans.hpp"
#include "polydawg/island/island.hpp"
#include "polydawg/migrator/migrator.hpp"
#include "polydawg/monitor/monitor.hpp"

namespace polydawg {

struct QueryResult {
  ResultSet result;
  std::vector<TaskSpan> spans;
  double elapsed_ms = 0;
};

/// Fixed-size pool of worker threads.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void submit(std::function<void()> job);
  std::size_t size() const { return threads_.size(); }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  std::vector<std::thread> threads_;
  bool stopping_ = false;
};

/// Throws PlanningError unless steps, dependencies and the root form a DAG.
void validate_plan(const QueryExecutionPlan& plan);

/// Runs execution plans: steps in dependency order, independent steps
/// concurrently, migrations through the migrator. Scratch objects are dropped
/// once the plan finishes, successfully or not.
class Executor {
 public:
  Executor(const catalog::Catalog& catalog, island::EngineRegistry& registry,
           migration::Migrator& migrator, monitor::Monitor& monitor, std::size_t workers = 4);

  QueryResult execute_plan(const QueryExecutionPlan& plan, SpanRecorder* spans = nullptr);

  /// As execute_plan, then records the duration under (signature, index).
  QueryResult execute_plan_measured(const QueryExecutionPlan& plan, const Signature& signature,
                                    std::size_t index, SpanRecorder* spans = nullptr);

  /// Runs on a background thread; the future carries the result or error.
  std::future<QueryResult> execute_plan_deferred(
      QueryExecutionPlan plan, std::optional<std::pair<Signature, std::size_t>> measure = std::nullopt);

  std::size_t workers() const { return pool_.size(); }

 private:
  ResultSet run_step(const QueryExecutionPlan& plan, int index,
                     const std::vector<std::optional<ResultSet>>& results, SpanRecorder* spans);
  void cleanup(const QueryExecutionPlan& plan);

  const catalog::Catalog& catalog_;
  island::EngineRegistry& registry_;
  migration::Migrator& migrator_;
  monitor::Monitor& monitor_;
  WorkerPool pool_;
};

}  // namespace polydawg
