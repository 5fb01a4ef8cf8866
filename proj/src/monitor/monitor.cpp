#include "polydawg/monitor/monitor.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>

#include "polydawg/error.hpp"
#include "polydawg/text_util.hpp"

namespace polydawg::monitor {

namespace {

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::CorruptCatalog, "corrupt monitor section: " + what);
}

template <typename T>
T parse_number(const std::string& s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) corrupt("bad number '" + s + "'");
  return v;
}

}  // namespace

void Monitor::set_runner(PlanRunner runner) {
  std::unique_lock lock(mutex_);
  runner_ = std::move(runner);
}

BenchmarkRecord* Monitor::find(const std::string& text) {
  auto it = index_.find(text);
  return it == index_.end() ? nullptr : &records_[it->second];
}

const BenchmarkRecord* Monitor::find(const std::string& text) const {
  auto it = index_.find(text);
  return it == index_.end() ? nullptr : &records_[it->second];
}

void Monitor::add_benchmark(const Signature& signature, bool lean,
                            const std::vector<std::string>& plan_ids) {
  if (plan_ids.empty()) throw Error(ErrorCode::InvalidArgument, "a benchmark needs at least one plan");
  PlanRunner runner;
  {
    std::unique_lock lock(mutex_);
    if (find(signature.text)) {
      throw Error(ErrorCode::DuplicateBenchmark, "benchmark already registered for " + signature.text);
    }
    BenchmarkRecord r{signature, {}};
    for (const auto& id : plan_ids) r.plans.push_back({id, {}, 0});
    index_[signature.text] = records_.size();
    records_.push_back(std::move(r));
    runner = runner_;
  }
  if (lean) return;
  if (!runner) throw Error(ErrorCode::InvalidArgument, "no plan runner configured");
  for (std::size_t i = 0; i < plan_ids.size(); ++i) {
    record_execution(signature, i, runner(signature, i));
  }
}

std::vector<std::optional<double>> Monitor::get_benchmark_performance(const Signature& signature) const {
  std::shared_lock lock(mutex_);
  const auto* r = find(signature.text);
  if (!r) throw Error(ErrorCode::UnknownSignature, "no benchmark for " + signature.text);
  std::vector<std::optional<double>> out;
  for (const auto& p : r->plans) {
    out.push_back(p.samples.empty() ? std::nullopt : std::optional<double>(p.samples.back()));
  }
  return out;
}

std::optional<Match> Monitor::get_closest_signature(const Signature& signature) const {
  std::shared_lock lock(mutex_);
  if (const auto* exact = find(signature.text)) return Match{exact->signature, 0.0};
  std::optional<Match> best;
  for (const auto& r : records_) {
    const double d = signature_distance(signature, r.signature);
    if (d <= kSignatureMatchThreshold && (!best || d < best->distance)) best = Match{r.signature, d};
  }
  return best;
}

void Monitor::record_execution(const Signature& signature, std::size_t plan_index,
                               double duration_ms, const std::string& plan_id) {
  if (!(duration_ms >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "durations must be non-negative");
  }
  std::unique_lock lock(mutex_);
  auto* r = find(signature.text);
  if (!r) {
    index_[signature.text] = records_.size();
    records_.push_back(BenchmarkRecord{signature, {}});
    r = &records_.back();
  }
  while (r->plans.size() <= plan_index) {
    r->plans.push_back({"plan" + std::to_string(r->plans.size()), {}, 0});
  }
  auto& p = r->plans[plan_index];
  if (!plan_id.empty()) p.plan_id = plan_id;
  p.samples.push_back(duration_ms);
  p.stamp = ++clock_;
}

std::size_t Monitor::refresh_task_tick(std::size_t budget) {
  struct Due {
    std::uint64_t stamp;
    std::size_t record;
    std::size_t plan;
  };
  std::vector<Due> due;
  PlanRunner runner;
  std::vector<Signature> sigs;
  {
    std::shared_lock lock(mutex_);
    runner = runner_;
    for (std::size_t r = 0; r < records_.size(); ++r) {
      sigs.push_back(records_[r].signature);
      for (std::size_t p = 0; p < records_[r].plans.size(); ++p) {
        due.push_back({records_[r].plans[p].stamp, r, p});
      }
    }
  }
  if (!runner || budget == 0) return 0;
  std::stable_sort(due.begin(), due.end(), [](const Due& a, const Due& b) { return a.stamp < b.stamp; });
  std::size_t refreshed = 0;
  for (std::size_t i = 0; i < due.size() && i < budget; ++i) {
    try {
      const double ms = runner(sigs[due[i].record], due[i].plan);
      record_execution(sigs[due[i].record], due[i].plan, ms);
      ++refreshed;
    } catch (const Error&) {
    }
  }
  return refreshed;
}

bool Monitor::contains(const Signature& signature) const {
  std::shared_lock lock(mutex_);
  return find(signature.text) != nullptr;
}

std::size_t Monitor::sample_count(const Signature& signature, std::size_t plan_index) const {
  std::shared_lock lock(mutex_);
  const auto* r = find(signature.text);
  if (!r || plan_index >= r->plans.size()) return 0;
  return r->plans[plan_index].samples.size();
}

std::vector<BenchmarkRecord> Monitor::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

// Layout:
//   clock <n>
//   benchmark <escaped query text> <plan count>
//   plan <escaped plan id> <stamp> <sample,sample,...>
catalog::Section Monitor::serialize() const {
  std::shared_lock lock(mutex_);
  catalog::Section s{kMonitorSection, {}};
  s.lines.push_back("clock\t" + std::to_string(clock_));
  for (const auto& r : records_) {
    s.lines.push_back("benchmark\t" + escape_tsv(r.signature.text) + "\t" +
                      std::to_string(r.plans.size()));
    for (const auto& p : r.plans) {
      std::vector<std::string> samples;
      for (double d : p.samples) samples.push_back(format_double(d));
      s.lines.push_back("plan\t" + escape_tsv(p.plan_id) + "\t" + std::to_string(p.stamp) + "\t" +
                        join(samples, ","));
    }
  }
  return s;
}

void Monitor::deserialize(const catalog::Section& section) {
  std::vector<BenchmarkRecord> records;
  std::map<std::string, std::size_t> index;
  std::uint64_t clock = 0;
  std::size_t pending = 0;
  for (const auto& line : section.lines) {
    const auto cells = split(line, '\t');
    if (cells[0] == "clock" && cells.size() == 2) {
      clock = parse_number<std::uint64_t>(cells[1]);
    } else if (cells[0] == "benchmark" && cells.size() == 3) {
      if (pending) corrupt("missing plan lines");
      std::string text;
      if (!unescape_tsv(cells[1], text)) corrupt("bad escape");
      Signature sig;
      try {
        sig = make_signature(text);
      } catch (const Error& e) {
        corrupt(std::string("unparseable benchmark query: ") + e.what());
      }
      if (index.count(sig.text)) corrupt("duplicate benchmark");
      index[sig.text] = records.size();
      records.push_back({sig, {}});
      pending = parse_number<std::size_t>(cells[2]);
    } else if (cells[0] == "plan" && cells.size() == 4 && pending) {
      PlanTimings p;
      if (!unescape_tsv(cells[1], p.plan_id)) corrupt("bad escape");
      p.stamp = parse_number<std::uint64_t>(cells[2]);
      if (!cells[3].empty()) {
        for (const auto& s : split(cells[3], ',')) p.samples.push_back(parse_number<double>(s));
      }
      records.back().plans.push_back(std::move(p));
      --pending;
    } else {
      corrupt("unexpected line '" + line + "'");
    }
  }
  if (pending) corrupt("missing plan lines");
  std::unique_lock lock(mutex_);
  records_ = std::move(records);
  index_ = std::move(index);
  clock_ = clock;
}

}  // namespace polydawg::monitor
