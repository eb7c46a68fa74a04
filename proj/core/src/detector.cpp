#include "driftlab/detector.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <stdexcept>

namespace driftlab {

int DetectorConfig::resolved_consecutive_tests() const {
  return consecutive_tests ? *consecutive_tests : window_size / 2;
}

void DetectorConfig::validate() const {
  if (window_size < 2) throw std::invalid_argument("window_size must be at least 2");
  const int c = resolved_consecutive_tests();
  if (c < 1) throw std::invalid_argument("consecutive_tests must be at least 1");
  if (c > window_size)
    throw std::invalid_argument("consecutive_tests cannot exceed window_size");
  if (!(p_threshold > 0.0 && p_threshold < 1.0))
    throw std::invalid_argument("p_threshold must lie in (0, 1)");
  if (asr_threshold < 0.0)
    throw std::invalid_argument("asr_threshold must be non-negative");
}

std::size_t minimum_stream_length(const DetectorConfig& cfg) {
  return std::size_t(2) * std::size_t(cfg.window_size) +
         std::size_t(cfg.resolved_consecutive_tests()) + 1;
}

ValidationResult validate_candidate(const EventStream& s, std::size_t ref_start,
                                    const DfRelation& r, const DetectorConfig& cfg,
                                    TestCache& cache) {
  const std::size_t w = std::size_t(cfg.window_size);
  const std::size_t c = std::size_t(cfg.resolved_consecutive_tests());

  ValidationResult result;
  // The battery needs windows from ref_start - c up to a detection window
  // ending at ref_start + c - 1 + 2w.
  if (ref_start < c || ref_start + c - 1 + 2 * w > s.size()) {
    result.out_of_bounds = true;
    return result;
  }

  WindowState ref_win(s, ref_start - c, w);
  WindowState det_win(s, ref_start - c + w, w);

  bool all_passed = true;
  for (std::size_t i = 0; i < 2 * c; ++i) {
    if (i > 0) {
      ref_win.advance();
      det_win.advance();
    }
    const std::size_t position = ref_start - c + i;
    const TestOutcome& outcome = cached_test(cache, position, ref_win.relation_counts(),
                                             det_win.relation_counts(), s.labels());
    result.p_values.push_back(outcome.p_value);
    const bool passed = !outcome.degenerate && outcome.p_value < cfg.p_threshold &&
                        outcome.asr_of(r) > cfg.asr_threshold;
    if (!passed) {
      all_passed = false;
      break;
    }
  }
  result.confirmed = all_passed;
  return result;
}

namespace {

struct DirectionOutcome {
  std::vector<DriftPoint> points;  // in the scanned stream's own coordinates
  std::size_t candidates = 0;
  std::size_t peak_relations = 0;
  std::size_t peak_traces = 0;
};

// One left-to-right detection scan over `s` (which may be a reversed view).
// Points carry indices in s's coordinates.
DirectionOutcome scan_stream(const EventStream& s, const DetectorConfig& cfg,
                             TestCache& cache, Direction tag,
                             const DetectorProbe* probe) {
  cfg.validate();
  const std::size_t n = s.size();
  const std::size_t w = std::size_t(cfg.window_size);
  const std::size_t c = std::size_t(cfg.resolved_consecutive_tests());
  if (n < minimum_stream_length(cfg))
    throw std::invalid_argument("stream of " + std::to_string(n) +
                                " events is too short; need at least " +
                                std::to_string(minimum_stream_length(cfg)));

  DirectionOutcome out;
  WindowState window(s, 0, w);
  std::size_t ref_start = 0;

  while (ref_start + 2 * w + c < n) {
    const auto novel = window.peek_new_relation();
    if (novel && window.is_novel(*novel)) {
      ++out.candidates;
      const ValidationResult validation =
          validate_candidate(s, ref_start, *novel, cfg, cache);
      if (probe && probe->on_candidate) probe->on_candidate(ref_start, *novel, validation);
      if (validation.confirmed) {
        const std::size_t e_index = ref_start + w;
        const StreamEvent& e = s[e_index];
        DriftPoint point;
        point.event_index = e_index;
        point.trace_index = e.trace;
        point.timestamp = e.timestamp;
        point.direction = tag;
        point.trigger = TriggerRelation{s.label(novel->source), s.label(novel->target)};
        point.battery_p_values = validation.p_values;
        out.points.push_back(std::move(point));

        // Reference window restarts at the reported event; exclusions drop.
        ref_start = e_index;
        window = WindowState(s, ref_start, w);
        continue;
      }
      window.exclude(*novel);
    }
    window.advance();
    ++ref_start;
    out.peak_relations = std::max(out.peak_relations, window.relation_counts().size());
    out.peak_traces = std::max(out.peak_traces, window.active_trace_count());
  }
  return out;
}

}  // namespace

std::vector<DriftPoint> detect_forward(const EventStream& s, const DetectorConfig& cfg,
                                       TestCache& cache, const DetectorProbe* probe) {
  return scan_stream(s, cfg, cache, Direction::forward, probe).points;
}

namespace {

std::vector<DriftPoint> map_backward_points(std::vector<DriftPoint> points,
                                            const EventStream& reversed) {
  const std::size_t n = reversed.size();
  for (auto& p : points) {
    p.event_index = n - 1 - p.event_index;
    std::swap(p.trigger.source, p.trigger.target);  // forward orientation
  }
  std::sort(points.begin(), points.end(),
            [](const DriftPoint& a, const DriftPoint& b) {
              return a.event_index < b.event_index;
            });
  return points;
}

}  // namespace

std::vector<DriftPoint> detect_backward(const EventStream& s, const DetectorConfig& cfg,
                                        TestCache& cache, const DetectorProbe* probe) {
  const EventStream reversed = reverse_stream(s);
  auto outcome = scan_stream(reversed, cfg, cache, Direction::backward, probe);
  return map_backward_points(std::move(outcome.points), reversed);
}

std::vector<DriftPoint> merge_reports(std::vector<DriftPoint> forward,
                                      std::vector<DriftPoint> backward,
                                      int window_size) {
  std::vector<DriftPoint> all;
  all.reserve(forward.size() + backward.size());
  std::move(forward.begin(), forward.end(), std::back_inserter(all));
  std::move(backward.begin(), backward.end(), std::back_inserter(all));
  std::sort(all.begin(), all.end(), [](const DriftPoint& a, const DriftPoint& b) {
    if (a.event_index != b.event_index) return a.event_index < b.event_index;
    return a.direction < b.direction;
  });

  std::vector<DriftPoint> merged;
  merged.reserve(all.size());
  for (auto& point : all) {
    if (!merged.empty()) {
      DriftPoint& kept = merged.back();
      const bool opposite = kept.direction != point.direction;
      const std::size_t distance = point.event_index - kept.event_index;
      if (opposite && distance < std::size_t(window_size) &&
          !kept.collapsed_event_index.has_value()) {
        kept.collapsed_event_index.emplace(point.event_index);
        kept.collapsed_direction.emplace(point.direction);
        continue;
      }
    }
    merged.push_back(std::move(point));
  }
  return merged;
}

DriftReport detect(const EventStream& s, const DetectorConfig& cfg) {
  cfg.validate();
  if (s.size() < minimum_stream_length(cfg))
    throw std::invalid_argument("stream of " + std::to_string(s.size()) +
                                " events is too short; need at least " +
                                std::to_string(minimum_stream_length(cfg)));
  const auto t0 = std::chrono::steady_clock::now();

  TestCache forward_cache(Direction::forward);
  TestCache backward_cache(Direction::backward);

  // The two directions are independent scans with their own state.
  auto backward_future = std::async(std::launch::async, [&] {
    const EventStream reversed = reverse_stream(s);
    auto outcome =
        scan_stream(reversed, cfg, backward_cache, Direction::backward, nullptr);
    outcome.points = map_backward_points(std::move(outcome.points), reversed);
    return outcome;
  });
  auto forward_outcome = scan_stream(s, cfg, forward_cache, Direction::forward, nullptr);
  auto backward_outcome = backward_future.get();

  DriftReport report;
  report.config = cfg;
  report.forward = forward_outcome.points;
  report.backward = backward_outcome.points;
  report.points = merge_reports(report.forward, report.backward, cfg.window_size);

  const auto t1 = std::chrono::steady_clock::now();
  RunStats& st = report.stats;
  st.events = s.size();
  st.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  st.per_event_ms = s.empty() ? 0.0 : st.wall_seconds * 1000.0 / double(s.size());
  st.tests_computed_forward = forward_cache.computed_count();
  st.tests_computed_backward = backward_cache.computed_count();
  st.candidates_forward = forward_outcome.candidates;
  st.candidates_backward = backward_outcome.candidates;
  st.cache_entries_forward = forward_cache.size();
  st.cache_entries_backward = backward_cache.size();
  st.peak_tracked_relations =
      std::max(forward_outcome.peak_relations, backward_outcome.peak_relations);
  st.peak_active_traces =
      std::max(forward_outcome.peak_traces, backward_outcome.peak_traces);
  return report;
}

DriftReport detect(const EventLog& log, const DetectorConfig& cfg) {
  return detect(to_event_stream(log, cfg.ordering), cfg);
}

}  // namespace driftlab
