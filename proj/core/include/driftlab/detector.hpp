#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "driftlab/dfr_window.hpp"
#include "driftlab/event_model.hpp"
#include "driftlab/stats.hpp"

namespace driftlab {

struct DetectorConfig {
  int window_size = 0;  // events; required, >= 2
  /// Tests per side of the candidate; defaults to window_size / 2.
  std::optional<int> consecutive_tests;
  double p_threshold = 0.05;
  double asr_threshold = 1.96;
  StreamOrdering ordering = StreamOrdering::trace_major;

  int resolved_consecutive_tests() const;
  /// Throws std::invalid_argument when out of range.
  void validate() const;
};

/// Shortest stream the detector accepts: 2*window_size + consecutive_tests + 1.
std::size_t minimum_stream_length(const DetectorConfig& cfg);

struct TriggerRelation {
  std::string source;
  std::string target;

  bool operator==(const TriggerRelation&) const = default;
};

struct DriftPoint {
  std::size_t event_index = 0;  // forward stream coordinates
  std::int32_t trace_index = -1;
  std::optional<TimestampMs> timestamp;
  Direction direction = Direction::forward;
  /// Relation that triggered the candidate, reported in forward orientation
  /// for both directions.
  TriggerRelation trigger;
  std::vector<double> battery_p_values;
  /// Merge diagnostics: the opposite-direction point this one absorbed.
  std::optional<std::size_t> collapsed_event_index;
  std::optional<Direction> collapsed_direction;
};

struct ValidationResult {
  bool confirmed = false;
  /// p-values of the executed battery tests; 2*consecutive_tests entries
  /// when confirmed, the prefix up to the first failure otherwise.
  std::vector<double> p_values;
  /// Candidate too close to a stream end to run the full battery.
  bool out_of_bounds = false;
};

/// Test hook observing every evaluated candidate.
struct DetectorProbe {
  std::function<void(std::size_t ref_start, DfRelation r, const ValidationResult&)>
      on_candidate;
};

struct RunStats {
  std::size_t events = 0;
  double wall_seconds = 0.0;
  double per_event_ms = 0.0;
  std::size_t tests_computed_forward = 0;
  std::size_t tests_computed_backward = 0;
  std::size_t candidates_forward = 0;
  std::size_t candidates_backward = 0;
  std::size_t cache_entries_forward = 0;
  std::size_t cache_entries_backward = 0;
  // Working-set high-water marks across both directions.
  std::size_t peak_tracked_relations = 0;
  std::size_t peak_active_traces = 0;
};

struct DriftReport {
  DetectorConfig config;
  std::vector<DriftPoint> points;  // merged, sorted by event index
  std::vector<DriftPoint> forward;
  std::vector<DriftPoint> backward;
  RunStats stats;
};

/**
 * @brief Battery of 2c consecutive window-pair tests around a candidate.
 *
 * Test i compares windows starting at ref_start - c + i and that start +
 * window_size. A test passes when p < p_threshold and the trigger's
 * detection-cell ASR exceeds asr_threshold; the candidate is confirmed only
 * when every test passes. Outcomes go through the cache.
 */
ValidationResult validate_candidate(const EventStream& s, std::size_t ref_start,
                                    const DfRelation& r, const DetectorConfig& cfg,
                                    TestCache& cache);

/**
 * @brief Scan the stream left to right, validating each novel
 * directly-follows relation as a drift candidate.
 *
 * On confirmation the reference window restarts at the reported event and
 * exclusions are cleared; on failure the relation is excluded and the
 * window slides by one event.
 */
std::vector<DriftPoint> detect_forward(const EventStream& s, const DetectorConfig& cfg,
                                       TestCache& cache,
                                       const DetectorProbe* probe = nullptr);

/// Forward detection on the reversed stream, results mapped back to forward
/// coordinates and forward-oriented trigger labels.
std::vector<DriftPoint> detect_backward(const EventStream& s, const DetectorConfig& cfg,
                                        TestCache& cache,
                                        const DetectorProbe* probe = nullptr);

/**
 * @brief Combine the two direction reports.
 *
 * A cross-direction pair closer than window_size events collapses to the
 * smaller-index point (greedy, left to right); a distance of exactly
 * window_size keeps both. Same-direction points never collapse.
 */
std::vector<DriftPoint> merge_reports(std::vector<DriftPoint> forward,
                                      std::vector<DriftPoint> backward,
                                      int window_size);

/// Full pipeline: both directions (run concurrently), merge, runtime stats.
DriftReport detect(const EventStream& s, const DetectorConfig& cfg);
DriftReport detect(const EventLog& log, const DetectorConfig& cfg);

}  // namespace driftlab
