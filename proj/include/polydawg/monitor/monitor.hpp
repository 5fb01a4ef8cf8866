#pragma once

#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "polydawg/catalog/catalog.hpp"
#include "polydawg/planner/signature.hpp"

namespace polydawg::monitor {

struct PlanTimings {
  std::string plan_id;
  std::vector<double> samples;  // ms, in recording order
  std::uint64_t stamp = 0;      // logical time of the latest sample, 0 if none
};

struct BenchmarkRecord {
  Signature signature;
  std::vector<PlanTimings> plans;  // in plan registration order
};

/// Executes plan `index` of the query identified by the signature and returns
/// its duration in ms.
using PlanRunner = std::function<double(const Signature&, std::size_t index)>;

struct Match {
  Signature signature;
  double distance = 0;
};

/// Benchmark registry: per-signature, per-plan timing history.
class Monitor {
 public:
  explicit Monitor(PlanRunner runner = {}) : runner_(std::move(runner)) {}

  void set_runner(PlanRunner runner);

  /// lean=false runs every plan once right away through the runner.
  void add_benchmark(const Signature& signature, bool lean, const std::vector<std::string>& plan_ids);

  /// Most recent sample per plan; nullopt marks a plan with no sample.
  std::vector<std::optional<double>> get_benchmark_performance(const Signature& signature) const;

  /// Registered signature nearest to `signature` within the match threshold.
  std::optional<Match> get_closest_signature(const Signature& signature) const;

  /// Appends a sample, registering the signature (and extending its plan
  /// list up to `plan_index`) when unknown.
  void record_execution(const Signature& signature, std::size_t plan_index, double duration_ms,
                        const std::string& plan_id = {});

  /// Re-runs up to `budget` plans, least recently sampled first (never
  /// sampled before sampled; ties by registration order). Returns how many
  /// produced a new sample.
  std::size_t refresh_task_tick(std::size_t budget);

  bool contains(const Signature& signature) const;
  std::size_t sample_count(const Signature& signature, std::size_t plan_index) const;
  std::vector<BenchmarkRecord> records() const;

  catalog::Section serialize() const;
  void deserialize(const catalog::Section& section);

 private:
  BenchmarkRecord* find(const std::string& text);
  const BenchmarkRecord* find(const std::string& text) const;

  mutable std::shared_mutex mutex_;
  std::vector<BenchmarkRecord> records_;
  std::map<std::string, std::size_t> index_;
  std::uint64_t clock_ = 0;
  PlanRunner runner_;
};

inline constexpr const char* kMonitorSection = "monitor";

}  // namespace polydawg::monitor
