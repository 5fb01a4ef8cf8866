#pragma once

#include <chrono>
#include <mutex>
#include <string>
#include <vector>

namespace polydawg {

namespace task {
inline constexpr const char* kOptimization = "Query optimization";
inline constexpr const char* kArrayQuery = "Scidb query";
inline constexpr const char* kRelationalQuery = "Relational query";
inline constexpr const char* kTextQuery = "Text query";
inline constexpr const char* kMigratorDispatch = "Migrator dispatch";
inline constexpr const char* kMigration = "Migration";
inline constexpr const char* kResultAssembly = "Result assembly";
}  // namespace task

struct TaskSpan {
  std::string task;
  double start_ms = 0;  // since query start
  double end_ms = 0;
  double duration() const { return end_ms - start_ms; }
};

/// Thread-safe collector of task spans relative to one query's start.
/// Every recorded span is also logged at DEBUG as `SPAN <qid> <task> <start> <end>`.
class SpanRecorder {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SpanRecorder(std::string query_id, Clock::time_point origin = Clock::now())
      : query_id_(std::move(query_id)), origin_(origin) {}

  double now_ms() const;
  void add(const std::string& task, double start_ms, double end_ms);
  /// Spans ordered by start time.
  std::vector<TaskSpan> spans() const;
  const std::string& query_id() const { return query_id_; }
  Clock::time_point origin() const { return origin_; }

  /// Records [construction, destruction) as one span.
  class Scope {
   public:
    Scope(SpanRecorder* recorder, std::string task);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    SpanRecorder* recorder_;
    std::string task_;
    double start_ = 0;
  };

 private:
  std::string query_id_;
  Clock::time_point origin_;
  mutable std::mutex mutex_;
  std::vector<TaskSpan> spans_;
};

/// Parses one `SPAN <qid> <task> <start> <end>` log line.
bool parse_span_line(const std::string& line, std::string& query_id, TaskSpan& span);

/// Sum of span durations divided by `wall_ms`.
double coverage(const std::vector<TaskSpan>& spans, double wall_ms);

}  // namespace polydawg
