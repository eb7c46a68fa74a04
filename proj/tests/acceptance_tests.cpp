// Acceptance suite: one test per release criterion, each printing a
// [PASS]/[FAIL] line with the measured numbers next to the pinned threshold.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "driftlab/detector.hpp"
#include "driftlab/evaluation.hpp"
#include "driftlab/stats.hpp"
#include "driftlab/synthlab.hpp"
#include "test_support.hpp"

using namespace driftlab;

namespace {

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  EXPECT_TRUE(pass) << "criterion " << criterion << ": " << detail;
}

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

ContingencyTable table2xk(const std::vector<std::array<std::int64_t, 2>>& cells) {
  ContingencyTable t;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    t.columns.push_back(DfRelation{std::int32_t(j), std::int32_t(j)});
    t.cells.push_back(cells[j]);
    t.row_totals[0] += cells[j][0];
    t.row_totals[1] += cells[j][1];
  }
  t.grand_total = t.row_totals[0] + t.row_totals[1];
  return t;
}

// The five change patterns used for the accuracy criteria, applied to the
// built-in base model.
std::vector<std::pair<std::string, ChangePattern>> accuracy_patterns() {
  const ProcessModel base = default_base_model();
  std::vector<std::pair<std::string, ChangePattern>> out;
  for (PatternKind kind :
       {PatternKind::serial_insert, PatternKind::conditional_insert,
        PatternKind::remove_fragment, PatternKind::swap_fragments,
        PatternKind::loop_fragment})
    out.push_back({pattern_name(kind), make_default_pattern(base, kind)});
  return out;
}

std::vector<EvalJob> accuracy_jobs(int seeds, double noise) {
  const ProcessModel base = default_base_model();
  std::vector<EvalJob> jobs;
  for (const auto& [name, pattern] : accuracy_patterns()) {
    for (int seed = 1; seed <= seeds; ++seed) {
      EvalJob job;
      job.label = name;
      job.base = base;
      job.patterns = {pattern};
      job.seed = std::uint64_t(seed);
      job.traces_per_segment = 100;
      job.segments = 10;  // nine drifts, one every 100 traces
      job.noise_add = noise;
      job.noise_remove = noise;
      job.config.window_size = 150;  // scaled to the inter-drift distance
      job.error_tolerances = {10, 50};
      jobs.push_back(job);
    }
  }
  return jobs;
}

}  // namespace

TEST(Acceptance, Criterion1StatisticalKernelGoldenValues) {
  const auto g_equal = g_statistic(table2xk({{5, 5}, {5, 5}}));
  const auto g_skew = g_statistic(table2xk({{30, 10}, {10, 30}}));
  const double sf_skew = chi_square_sf(g_skew.statistic, g_skew.degrees_of_freedom);
  const double sf_crit = chi_square_sf(3.841, 1);
  const double oracle = testsupport::chi2_sf_quadrature(3.841, 1);

  const bool pass = g_equal.statistic == 0.0 &&
                    std::fabs(g_skew.statistic - 20.93) < 1e-2 && sf_skew < 1e-5 &&
                    std::fabs(sf_crit - 0.0500) < 1e-3 &&
                    std::fabs(sf_crit - oracle) < 1e-8;
  report(1, pass,
         fmt("statistical kernel: G[[5,5],[5,5]]=%g, G[[30,10],[10,30]]=%.5f "
             "(=20.93 within 1e-2), sf(G,1)=%.3g (<1e-5), sf(3.841,1)=%.5f "
             "(=0.0500 within 1e-3, quadrature oracle %.5f)",
             g_equal.statistic, g_skew.statistic, sf_skew, sf_crit, oracle));
}

TEST(Acceptance, Criterion2IncrementalWindowOracleEquivalence) {
  Rng rng(22022);
  std::size_t streams_checked = 0, advances = 0;
  bool pass = true;
  while (streams_checked < 100 && pass) {
    const EventLog log = testsupport::random_interleaved_log(rng, 10000, 50, 12);
    const EventStream s = to_event_stream(log, StreamOrdering::timestamp);
    if (s.size() < 4) continue;
    ++streams_checked;
    const std::size_t window = 2 + rng.uniform_index(std::min<std::size_t>(s.size() - 2, 300));
    WindowState w(s, 0, window);
    std::size_t step = 0;
    while (w.start() + w.size() < s.size() && pass) {
      w.advance();
      ++advances;
      ++step;
      const RelationCounts fresh = extract_df_relations(s, w.start(), w.start() + w.size());
      pass = pass && fresh == w.relation_counts();
      // Independent (string-keyed, group-by-trace) oracle on a sample of
      // positions plus the final window.
      if (step % 97 == 0 || w.start() + w.size() == s.size()) {
        const auto naive = testsupport::naive_df_counts(s, w.start(), w.start() + w.size());
        std::size_t matched = 0;
        for (const auto& [rel, n] : w.relation_counts()) {
          auto it = naive.find({s.label(rel.source), s.label(rel.target)});
          if (it == naive.end() || it->second != n) {
            pass = false;
            break;
          }
          ++matched;
        }
        pass = pass && matched == naive.size();
      }
    }
  }
  report(2, pass,
         fmt("incremental window equals from-scratch extraction on %zu random "
             "streams (%zu advances, every step checked)",
             streams_checked, advances));
}

TEST(Acceptance, Criterion3BackwardForwardDuality) {
  Rng rng(33033);
  const ProcessModel base = default_base_model();
  const auto patterns = accuracy_patterns();
  bool pass = true;
  int streams = 0;
  for (int round = 0; round < 20 && pass; ++round) {
    EventStream s;
    if (round % 2 == 0) {
      // Drifting synthetic log: backward search has real work to do.
      const auto& [name, pattern] = patterns[std::size_t(round / 2) % patterns.size()];
      const ProcessModel changed = apply_change_pattern(base, pattern);
      const auto [log, truth] =
          generate_drift_log({base, changed, base, changed}, 120, rng.next());
      s = to_event_stream(log, StreamOrdering::trace_major);
    } else {
      const EventLog log = testsupport::random_interleaved_log(rng, 4000, 40, 8);
      s = to_event_stream(log, StreamOrdering::timestamp);
    }
    DetectorConfig cfg;
    cfg.window_size = 100;
    if (s.size() < minimum_stream_length(cfg)) continue;
    ++streams;

    TestCache bwd_cache(Direction::backward);
    const auto bwd = detect_backward(s, cfg, bwd_cache);
    TestCache fwd_cache(Direction::forward);
    auto mapped = detect_forward(reverse_stream(s), cfg, fwd_cache);
    for (auto& p : mapped) {
      p.event_index = s.size() - 1 - p.event_index;
      std::swap(p.trigger.source, p.trigger.target);
    }
    std::reverse(mapped.begin(), mapped.end());

    pass = pass && bwd.size() == mapped.size();
    for (std::size_t i = 0; pass && i < bwd.size(); ++i) {
      pass = bwd[i].event_index == mapped[i].event_index &&
             bwd[i].trace_index == mapped[i].trace_index &&
             bwd[i].trigger == mapped[i].trigger &&
             bwd[i].battery_p_values == mapped[i].battery_p_values;
    }
  }
  report(3, pass,
         fmt("backward run equals index-mapped forward run on the reversed "
             "stream, exactly, on %d streams",
             streams));
}

TEST(Acceptance, Criterion4NoiseFreeAccuracy) {
  const auto jobs = accuracy_jobs(2, 0.0);
  const auto results = run_evaluation(jobs, 2);
  double f10 = 0, f50 = 0;
  for (const auto& r : results) {
    f10 += r.metrics[0].f_score;
    f50 += r.metrics[1].f_score;
  }
  f10 /= double(results.size());
  f50 /= double(results.size());
  const bool pass = f10 >= 0.80 && f50 >= 0.85;
  report(4, pass,
         fmt("noise-free accuracy over 5 patterns x 2 seeds, 1000 traces, 9 "
             "drifts, window 150: mean f@ET10=%.3f (>=0.80), mean "
             "f@ET50=%.3f (>=0.85)",
             f10, f50));
}

TEST(Acceptance, Criterion5NoiseRobustness) {
  const auto jobs = accuracy_jobs(10, 0.10);
  const auto results = run_evaluation(jobs, 2);
  double f50 = 0, precision50 = 0;
  long total_tp = 0, total_fp = 0;
  for (const auto& r : results) {
    f50 += r.metrics[1].f_score;
    precision50 += r.metrics[1].precision;
    total_tp += r.metrics[1].tp;
    total_fp += r.metrics[1].fp;
  }
  f50 /= double(results.size());
  precision50 /= double(results.size());
  const long detections = total_tp + total_fp;
  const double fp_share = detections > 0 ? double(total_fp) / double(detections) : 0.0;
  const bool pass = f50 >= 0.60 && precision50 >= 0.85 && fp_share <= 0.20;
  report(5, pass,
         fmt("10%% add+remove noise over 5 patterns x 10 seeds: mean "
             "f@ET50=%.3f (>=0.60), mean precision=%.3f (>=0.85), FP share "
             "%ld/%ld=%.3f (<=0.20)",
             f50, precision50, total_fp, detections, fp_share));
}

TEST(Acceptance, Criterion6PerEventThroughput) {
  // Drift-free stream: every trace is the same five-activity sequence, so
  // no relation is ever novel past the first window.
  ProcessModel constant;
  constant.root.kind = NodeKind::sequence;
  for (const char* label : {"A", "B", "C", "D", "E"}) {
    ModelNode n;
    n.kind = NodeKind::activity;
    n.label = label;
    constant.root.children.push_back(std::move(n));
  }
  constant.validate();

  const std::size_t traces = 200000;  // one million events
  EventLog log;
  log.traces.resize(traces);
  Rng rng(6);
  for (std::size_t i = 0; i < traces; ++i) {
    log.traces[i].id = "t" + std::to_string(i);
    for (auto& activity : sample_trace(constant, rng))
      log.traces[i].events.push_back(LogEvent{std::move(activity), std::nullopt});
  }

  DetectorConfig cfg;
  cfg.window_size = 1500;
  const DriftReport r = detect(log, cfg);

  const bool no_tests = r.stats.tests_computed_forward == 0 &&
                        r.stats.tests_computed_backward == 0 &&
                        r.stats.cache_entries_forward == 0 &&
                        r.stats.cache_entries_backward == 0;
  const bool bounded_state =
      r.stats.peak_tracked_relations <= 25 &&  // alphabet squared
      r.stats.peak_active_traces <= std::size_t(cfg.window_size);
  const bool pass = r.stats.events == 1000000 && r.points.empty() && no_tests &&
                    bounded_state && r.stats.per_event_ms <= 1.0;
  report(6, pass,
         fmt("drift-free 10^6-event stream, window 1500: %.5f ms/event "
             "(<=1.0), %zu tests computed, peak %zu relation types / %zu "
             "active traces (bounded by window)",
             r.stats.per_event_ms,
             r.stats.tests_computed_forward + r.stats.tests_computed_backward,
             r.stats.peak_tracked_relations, r.stats.peak_active_traces));
}

TEST(Acceptance, Criterion7MergeRuleConformance) {
  const auto mk = [](std::size_t index, Direction d) {
    DriftPoint p;
    p.event_index = index;
    p.direction = d;
    return p;
  };
  bool pass = true;

  // Cross-direction closer than the window: smaller index wins.
  auto m = merge_reports({mk(1000, Direction::forward)},
                         {mk(1200, Direction::backward)}, 500);
  pass = pass && m.size() == 1 && m[0].event_index == 1000;
  m = merge_reports({mk(1200, Direction::forward)}, {mk(1000, Direction::backward)}, 500);
  pass = pass && m.size() == 1 && m[0].event_index == 1000;

  // Boundary: distance exactly window_size stays separate.
  m = merge_reports({mk(1000, Direction::forward)}, {mk(1500, Direction::backward)}, 500);
  pass = pass && m.size() == 2;
  m = merge_reports({mk(1000, Direction::forward)}, {mk(1499, Direction::backward)}, 500);
  pass = pass && m.size() == 1 && m[0].event_index == 1000;

  // Same direction never collapses; one-sided lists pass through.
  m = merge_reports({mk(1000, Direction::forward), mk(1100, Direction::forward)}, {}, 500);
  pass = pass && m.size() == 2;
  m = merge_reports({}, {mk(800, Direction::backward)}, 500);
  pass = pass && m.size() == 1 && m[0].event_index == 800;

  report(7, pass,
         "merge rule: smaller index wins across directions under the window "
         "distance, exact-window distance kept separate, same-direction "
         "points never collapse");
}

TEST(Acceptance, Criterion8ExclusionRuleRegression) {
  // Base behaviour <A,C>, drifted behaviour <A,B>; one noise event B is
  // spliced in 30 events before the drift so the noise relation A>B matches
  // a relation the drift adds. Two-event traces, window 60.
  EventLog log;
  const int traces = 1000, drift_trace = 500;
  for (int i = 0; i < traces; ++i) {
    Trace t;
    t.id = "t" + std::to_string(i);
    t.events.push_back({"A", std::nullopt});
    t.events.push_back({i < drift_trace ? "C" : "B", std::nullopt});
    log.traces.push_back(std::move(t));
  }
  // Drift begins at event 1000; trace 485 covers events 970..971. Inserting
  // B after its A puts the noise A>B occurrence at index 971, which is 30
  // events before the (shifted) first drifted event at index 1001.
  const int noise_trace = 485;
  log.traces[noise_trace].events.insert(log.traces[noise_trace].events.begin() + 1,
                                        {"B", std::nullopt});

  const EventStream s = to_event_stream(log, StreamOrdering::trace_major);
  DetectorConfig cfg;
  cfg.window_size = 60;

  bool noise_candidate_seen = false, noise_candidate_rejected = false;
  bool drift_candidate_confirmed = false;
  DetectorProbe probe;
  probe.on_candidate = [&](std::size_t ref_start, DfRelation rel,
                           const ValidationResult& v) {
    const std::size_t peeked = ref_start + std::size_t(cfg.window_size);
    const std::int32_t trace = s[peeked].trace;
    const bool is_ab = s.label(rel.source) == "A" && s.label(rel.target) == "B";
    if (is_ab && trace == noise_trace) {
      noise_candidate_seen = true;
      noise_candidate_rejected = !v.confirmed;
    }
    if (is_ab && trace >= drift_trace && v.confirmed) drift_candidate_confirmed = true;
  };

  TestCache cache(Direction::forward);
  const auto points = detect_forward(s, cfg, cache, &probe);

  std::vector<std::int64_t> detected;
  for (const auto& p : points) detected.push_back(p.trace_index);
  const ScoreResult sc = score(detected, {drift_trace}, 10);

  const bool pass = noise_candidate_seen && noise_candidate_rejected &&
                    drift_candidate_confirmed && points.size() == 1 && sc.tp == 1 &&
                    sc.fp == 0;
  report(8, pass,
         fmt("noise A>B 30 events before a drift adding A>B: noise candidate "
             "%s and rejected, drift confirmed at trace %d (truth %d, ET 10, "
             "%zu point(s))",
             noise_candidate_seen ? "evaluated" : "NOT SEEN",
             points.empty() ? -1 : int(points[0].trace_index), drift_trace,
             points.size()));
}
