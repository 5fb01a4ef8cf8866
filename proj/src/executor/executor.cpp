#include "polydawg/executor/executor.hpp"

#include <algorithm>
#include <chrono>

#include "polydawg/error.hpp"

namespace polydawg {

using bql::Island;

WorkerPool::WorkerPool(std::size_t workers) {
  workers = std::max<std::size_t>(1, workers);
  for (std::size_t i = 0; i < workers; ++i) {
    threads_.emplace_back([this] {
      while (true) {
        std::function<void()> job;
        {
          std::unique_lock lock(mutex_);
          cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
          if (jobs_.empty()) return;
          job = std::move(jobs_.front());
          jobs_.pop_front();
        }
        job();
      }
    });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::submit(std::function<void()> job) {
  {
    std::lock_guard lock(mutex_);
    jobs_.push_back(std::move(job));
  }
  cv_.notify_one();
}

void validate_plan(const QueryExecutionPlan& plan) {
  const int n = static_cast<int>(plan.steps.size());
  if (n == 0 || plan.root < 0 || plan.root >= n) {
    throw Error(ErrorCode::PlanningError, "plan has no valid root step");
  }
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> users(n);
  for (int i = 0; i < n; ++i) {
    for (int d : plan.steps[i].deps) {
      if (d < 0 || d >= n || d == i) {
        throw Error(ErrorCode::PlanningError, "step " + std::to_string(i) + " has a bad dependency");
      }
      ++indegree[i];
      users[d].push_back(i);
    }
    const auto& s = plan.steps[i];
    if (s.kind == QepStep::Kind::Migration && s.source_step &&
        std::find(s.deps.begin(), s.deps.end(), *s.source_step) == s.deps.end()) {
      throw Error(ErrorCode::PlanningError,
                  "step " + std::to_string(i) + " reads a step it does not depend on");
    }
  }
  std::vector<int> ready;
  for (int i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  int seen = 0;
  while (!ready.empty()) {
    const int s = ready.back();
    ready.pop_back();
    ++seen;
    for (int u : users[s]) {
      if (--indegree[u] == 0) ready.push_back(u);
    }
  }
  if (seen != n) throw Error(ErrorCode::PlanningError, "plan dependencies contain a cycle");
}

Executor::Executor(const catalog::Catalog& catalog, island::EngineRegistry& registry,
                   migration::Migrator& migrator, monitor::Monitor& monitor, std::size_t workers)
    : catalog_(catalog), registry_(registry), migrator_(migrator), monitor_(monitor), pool_(workers) {}

namespace {

const char* query_task(Island island) {
  switch (island) {
    case Island::Relational: return task::kRelationalQuery;
    case Island::Array: return task::kArrayQuery;
    case Island::Text: break;
  }
  return task::kTextQuery;
}

}  // namespace

ResultSet Executor::run_step(const QueryExecutionPlan& plan, int index,
                             const std::vector<std::optional<ResultSet>>& results,
                             SpanRecorder* spans) {
  const QepStep& step = plan.steps[index];
  if (step.kind == QepStep::Kind::Query) {
    SpanRecorder::Scope span(spans, query_task(step.body.island()));
    try {
      return island::execute_on(catalog_, registry_, step.engine_id, step.body, step.bindings);
    } catch (const Error& e) {
      throw Error(ErrorCode::LocalQueryExecution,
                  "step " + std::to_string(index) + " on engine " + std::to_string(step.engine_id) +
                      ": " + e.what())
          .with_cause(e.cause());
    }
  }
  migration::ConnectionInfo from{step.source_kind, step.source_engine, ""};
  migration::ConnectionInfo to{step.dest_kind, step.engine_id, ""};
  migration::MigrationParams params{step.dest_object, step.schema, true};
  if (step.source_step) {
    migrator_.migrate_result(*results[*step.source_step], from, to, step.dest_object, params, spans);
  } else {
    migrator_.migrate(from, step.source_object, to, step.dest_object, params, spans);
  }
  return ResultSet{};
}

void Executor::cleanup(const QueryExecutionPlan& plan) {
  for (const auto& step : plan.steps) {
    if (step.kind != QepStep::Kind::Migration) continue;
    try {
      registry_.get(step.engine_id)->drop_object(step.dest_object);
    } catch (const Error&) {
    }
  }
}

QueryResult Executor::execute_plan(const QueryExecutionPlan& plan, SpanRecorder* spans) {
  validate_plan(plan);
  std::optional<SpanRecorder> own;
  if (!spans) {
    own.emplace("plan");
    spans = &*own;
  }
  const double start = spans->now_ms();
  const int n = static_cast<int>(plan.steps.size());
  std::vector<int> priority(n, n);
  for (std::size_t i = 0; i < plan.order.size(); ++i) {
    if (plan.order[i] >= 0 && plan.order[i] < n) priority[plan.order[i]] = static_cast<int>(i);
  }
  std::vector<int> pending(n, 0);
  std::vector<std::vector<int>> users(n);
  for (int i = 0; i < n; ++i) {
    pending[i] = static_cast<int>(plan.steps[i].deps.size());
    for (int d : plan.steps[i].deps) users[d].push_back(i);
  }

  std::mutex mutex;
  std::condition_variable cv;
  std::vector<std::optional<ResultSet>> results(n);
  std::vector<int> ready;
  std::exception_ptr failure;
  int running = 0;
  int finished = 0;
  for (int i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.push_back(i);
  }

  // Called with `mutex` held.
  auto complete = [&](int i, ResultSet r) {
    results[i] = std::move(r);
    ++finished;
    for (int u : users[i]) {
      if (--pending[u] == 0) ready.push_back(u);
    }
  };
  auto run = [&](int i) {
    try {
      ResultSet r = run_step(plan, i, results, spans);
      std::lock_guard lock(mutex);
      complete(i, std::move(r));
    } catch (...) {
      std::lock_guard lock(mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  {
    std::unique_lock lock(mutex);
    while (true) {
      cv.wait(lock, [&] { return !ready.empty() || running == 0; });
      if (failure || finished == n) {
        if (running == 0) break;
        cv.wait(lock, [&] { return running == 0; });
        break;
      }
      if (ready.empty()) {
        if (running == 0) {
          failure = std::make_exception_ptr(Error(ErrorCode::PlanningError, "plan stalled"));
          break;
        }
        continue;
      }
      std::sort(ready.begin(), ready.end(), [&](int a, int b) { return priority[a] < priority[b]; });
      std::vector<int> batch;
      batch.swap(ready);
      if (batch.size() == 1 && running == 0) {
        lock.unlock();
        run(batch[0]);
        lock.lock();
        continue;
      }
      for (int i : batch) {
        ++running;
        pool_.submit([&, i] {
          run(i);
          std::lock_guard inner(mutex);
          --running;
          cv.notify_all();
        });
      }
    }
  }

  QueryResult out;
  {
    SpanRecorder::Scope span(spans, task::kResultAssembly);
    cleanup(plan);
    if (!failure) out.result = std::move(*results[plan.root]);
  }
  if (failure) std::rethrow_exception(failure);
  out.elapsed_ms = spans->now_ms() - start;
  out.spans = spans->spans();
  return out;
}

QueryResult Executor::execute_plan_measured(const QueryExecutionPlan& plan,
                                            const Signature& signature, std::size_t index,
                                            SpanRecorder* spans) {
  QueryResult r = execute_plan(plan, spans);
  monitor_.record_execution(signature, index, r.elapsed_ms, plan.id);
  return r;
}

std::future<QueryResult> Executor::execute_plan_deferred(
    QueryExecutionPlan plan, std::optional<std::pair<Signature, std::size_t>> measure) {
  return std::async(std::launch::async, [this, plan = std::move(plan), measure = std::move(measure)] {
    if (measure) return execute_plan_measured(plan, measure->first, measure->second);
    return execute_plan(plan);
  });
}

}  // namespace polydawg
