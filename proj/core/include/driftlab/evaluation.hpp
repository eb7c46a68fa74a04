#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftlab/detector.hpp"
#include "driftlab/synthlab.hpp"

namespace driftlab {

/**
 * @brief One synthetic evaluation run: generate a drifting log from the
 * base model and patterns, optionally add noise, detect, score.
 *
 * Segments alternate base / altered model. Sub-seeds for generation and
 * noise are derived from `seed`, so a job is fully reproducible.
 */
struct EvalJob {
  std::string label;                    // pattern name or "composite"
  ProcessModel base;
  std::vector<ChangePattern> patterns;  // applied in order to form the altered model
  std::uint64_t seed = 0;
  int traces_per_segment = 100;
  int segments = 10;
  double noise_add = 0.0;
  double noise_remove = 0.0;
  NoiseMode noise_mode = NoiseMode::random_activity;
  DetectorConfig config;
  std::vector<std::int64_t> error_tolerances;  // trace units
};

struct EvalMetrics {
  std::int64_t et = 0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

struct EvalResult {
  std::string label;
  std::uint64_t seed = 0;
  std::vector<EvalMetrics> metrics;           // one entry per error tolerance
  std::vector<std::int64_t> detected_traces;  // merged detections
  std::vector<std::int64_t> actual_traces;    // ground truth
  std::size_t events = 0;
  double detect_seconds = 0.0;
  double per_event_ms = 0.0;
};

EvalResult run_eval_job(const EvalJob& job);

/// Runs jobs on up to `parallelism` worker threads; result order follows
/// job order regardless of scheduling.
std::vector<EvalResult> run_evaluation(const std::vector<EvalJob>& jobs, int parallelism);

/// Detail rows per (job, seed) plus per-label and overall mean rows, with
/// one metric column group per error tolerance.
std::string evaluation_csv(const std::vector<EvalJob>& jobs,
                           const std::vector<EvalResult>& results);

}  // namespace driftlab
