#include "driftlab/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <thread>

#include "driftlab/rng.hpp"

namespace driftlab {

EvalResult run_eval_job(const EvalJob& job) {
  ProcessModel altered = job.base;
  for (const auto& pattern : job.patterns)
    altered = apply_change_pattern(altered, pattern);

  std::vector<ProcessModel> segments;
  segments.reserve(std::size_t(job.segments));
  for (int k = 0; k < job.segments; ++k)
    segments.push_back(k % 2 == 0 ? job.base : altered);

  auto [log, truth] = generate_drift_log(segments, job.traces_per_segment,
                                         derive_seed(job.seed, 0x67656e));
  if (job.noise_add > 0.0 || job.noise_remove > 0.0)
    log = inject_noise(log, job.noise_add, job.noise_remove,
                       derive_seed(job.seed, 0x6e6f69), job.noise_mode);

  const DriftReport report = detect(log, job.config);

  EvalResult result;
  result.label = job.label;
  result.seed = job.seed;
  result.events = report.stats.events;
  result.detect_seconds = report.stats.wall_seconds;
  result.per_event_ms = report.stats.per_event_ms;
  result.actual_traces = truth.drift_trace_indexes;
  for (const auto& p : report.points)
    result.detected_traces.push_back(p.trace_index);
  std::sort(result.detected_traces.begin(), result.detected_traces.end());

  for (const std::int64_t et : job.error_tolerances) {
    const ScoreResult s = score(result.detected_traces, result.actual_traces, et);
    result.metrics.push_back(
        EvalMetrics{et, s.tp, s.fp, s.fn, s.precision, s.recall, s.f_score});
  }
  return result;
}

std::vector<EvalResult> run_evaluation(const std::vector<EvalJob>& jobs, int parallelism) {
  std::vector<EvalResult> results(jobs.size());
  if (jobs.empty()) return results;

  const int workers =
      std::max(1, std::min<int>(parallelism, int(jobs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = run_eval_job(jobs[i]);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors;
  errors.resize(std::size_t(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          results[i] = run_eval_job(jobs[i]);
        }
      } catch (...) {
        errors[std::size_t(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

namespace {

struct Accumulator {
  int tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f = 0;
  int runs = 0;

  void add(const EvalMetrics& m) {
    tp += m.tp;
    fp += m.fp;
    fn += m.fn;
    precision += m.precision;
    recall += m.recall;
    f += m.f_score;
    ++runs;
  }
};

void write_metric_cells(std::ostringstream& out, const EvalMetrics& m) {
  out << ',' << m.tp << ',' << m.fp << ',' << m.fn << ',' << m.precision << ','
      << m.recall << ',' << m.f_score;
}

}  // namespace

std::string evaluation_csv(const std::vector<EvalJob>& jobs,
                           const std::vector<EvalResult>& results) {
  std::ostringstream out;
  out.precision(6);

  const std::vector<std::int64_t> ets =
      jobs.empty() ? std::vector<std::int64_t>{} : jobs.front().error_tolerances;
  out << "scope,pattern,seed,noise_add,noise_remove,window,detections";
  for (const std::int64_t et : ets)
    out << ",tp_et" << et << ",fp_et" << et << ",fn_et" << et << ",precision_et" << et
        << ",recall_et" << et << ",f_et" << et;
  out << '\n';

  // label -> per-ET accumulators, insertion ordered via first appearance.
  std::vector<std::string> label_order;
  std::map<std::string, std::vector<Accumulator>> by_label;
  std::vector<Accumulator> overall(ets.size());

  for (std::size_t i = 0; i < results.size(); ++i) {
    const EvalJob& job = jobs[i];
    const EvalResult& r = results[i];
    out << "run," << r.label << ',' << r.seed << ',' << job.noise_add << ','
        << job.noise_remove << ',' << job.config.window_size << ','
        << r.detected_traces.size();
    if (!by_label.contains(r.label)) {
      label_order.push_back(r.label);
      by_label[r.label].resize(ets.size());
    }
    for (std::size_t m = 0; m < r.metrics.size(); ++m) {
      write_metric_cells(out, r.metrics[m]);
      if (m < ets.size()) {
        by_label[r.label][m].add(r.metrics[m]);
        overall[m].add(r.metrics[m]);
      }
    }
    out << '\n';
  }

  const auto write_mean_row = [&](const std::string& scope, const std::string& label,
                                  const std::vector<Accumulator>& accs) {
    out << scope << ',' << label << ",,,,,";
    for (const auto& a : accs) {
      const double runs = a.runs > 0 ? double(a.runs) : 1.0;
      out << ',' << a.tp << ',' << a.fp << ',' << a.fn << ',' << a.precision / runs << ','
          << a.recall / runs << ',' << a.f / runs;
    }
    out << '\n';
  };

  for (const auto& label : label_order)
    write_mean_row("pattern_mean", label, by_label[label]);
  if (!results.empty()) write_mean_row("overall_mean", "all", overall);
  return out.str();
}

}  // namespace driftlab
