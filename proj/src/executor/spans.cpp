#include "polydawg/executor/spans.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <sstream>

namespace polydawg {

double SpanRecorder::now_ms() const {
  return std::chrono::duration<double, std::milli>(Clock::now() - origin_).count();
}

void SpanRecorder::add(const std::string& task, double start_ms, double end_ms) {
  if (end_ms < start_ms) end_ms = start_ms;
  spdlog::debug("SPAN {} {} {:.3f} {:.3f}", query_id_, task, start_ms, end_ms);
  std::lock_guard lock(mutex_);
  spans_.push_back({task, start_ms, end_ms});
}

std::vector<TaskSpan> SpanRecorder::spans() const {
  std::lock_guard lock(mutex_);
  auto out = spans_;
  std::stable_sort(out.begin(), out.end(),
                   [](const TaskSpan& a, const TaskSpan& b) { return a.start_ms < b.start_ms; });
  return out;
}

SpanRecorder::Scope::Scope(SpanRecorder* recorder, std::string task)
    : recorder_(recorder), task_(std::move(task)) {
  if (recorder_) start_ = recorder_->now_ms();
}

SpanRecorder::Scope::~Scope() {
  if (recorder_) recorder_->add(task_, start_, recorder_->now_ms());
}

bool parse_span_line(const std::string& line, std::string& query_id, TaskSpan& span) {
  const auto at = line.find("SPAN ");
  if (at == std::string::npos) return false;
  std::istringstream in(line.substr(at + 5));
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  if (words.size() < 4) return false;
  try {
    span.start_ms = std::stod(words[words.size() - 2]);
    span.end_ms = std::stod(words.back());
  } catch (const std::exception&) {
    return false;
  }
  query_id = words[0];
  span.task.clear();
  for (std::size_t i = 1; i + 2 < words.size(); ++i) {
    if (!span.task.empty()) span.task += ' ';
    span.task += words[i];
  }
  return true;
}

double coverage(const std::vector<TaskSpan>& spans, double wall_ms) {
  if (wall_ms <= 0) return 0;
  double sum = 0;
  for (const auto& s : spans) sum += s.duration();
  return sum / wall_ms;
}

}  // namespace polydawg
