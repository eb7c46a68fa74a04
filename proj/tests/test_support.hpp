#pragma once

// Shared fixtures and independent reference implementations ("oracles") the
// tests check the library against. Everything here is deliberately naive and
// kept free of the code paths under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driftlab/event_model.hpp"
#include "driftlab/rng.hpp"

namespace testsupport {

// ---------------------------------------------------------------------------
// Log construction helpers.

inline driftlab::EventLog make_log(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& traces) {
  driftlab::EventLog log;
  for (const auto& [id, activities] : traces) {
    driftlab::Trace t;
    t.id = id;
    for (const auto& a : activities) t.events.push_back({a, std::nullopt});
    log.traces.push_back(std::move(t));
  }
  return log;
}

// Random log whose stream (under timestamp ordering) interleaves traces
// arbitrarily: timestamps are a random permutation of 0..n-1.
inline driftlab::EventLog random_interleaved_log(driftlab::Rng& rng,
                                                 std::size_t max_events,
                                                 std::size_t max_traces,
                                                 std::size_t alphabet) {
  const std::size_t n = 2 + rng.uniform_index(max_events - 1);
  const std::size_t traces = 1 + rng.uniform_index(max_traces);
  std::vector<std::int64_t> stamps(n);
  for (std::size_t i = 0; i < n; ++i) stamps[i] = std::int64_t(i) * 1000;
  for (std::size_t i = n; i > 1; --i)
    std::swap(stamps[i - 1], stamps[rng.uniform_index(i)]);

  driftlab::EventLog log;
  log.traces.resize(traces);
  for (std::size_t t = 0; t < traces; ++t) log.traces[t].id = "t" + std::to_string(t);
  std::vector<std::vector<std::int64_t>> per_trace(traces);
  for (std::size_t i = 0; i < n; ++i)
    per_trace[rng.uniform_index(traces)].push_back(stamps[i]);
  for (std::size_t t = 0; t < traces; ++t) {
    std::sort(per_trace[t].begin(), per_trace[t].end());
    for (std::int64_t ts : per_trace[t]) {
      char activity = char('a' + rng.uniform_index(alphabet));
      log.traces[t].events.push_back({std::string(1, activity), ts});
    }
  }
  return log;
}

// ---------------------------------------------------------------------------
// Directly-follows oracle: group a stream slice by trace, count adjacent
// pairs. Key is (source label, target label).

using LabelPairCounts = std::map<std::pair<std::string, std::string>, std::int64_t>;

inline LabelPairCounts naive_df_counts(const driftlab::EventStream& s, std::size_t begin,
                                       std::size_t end) {
  std::map<std::int32_t, std::vector<std::int32_t>> by_trace;
  for (std::size_t i = begin; i < end && i < s.size(); ++i)
    by_trace[s[i].trace].push_back(s[i].activity);
  LabelPairCounts counts;
  for (const auto& [trace, acts] : by_trace)
    for (std::size_t i = 0; i + 1 < acts.size(); ++i)
      ++counts[{s.label(acts[i]), s.label(acts[i + 1])}];
  return counts;
}

// ---------------------------------------------------------------------------
// Chi-square survival oracle: adaptive Simpson quadrature of the density,
// integrated in u = sqrt(t) so the df = 1 endpoint is regular.

namespace detail {

inline double chi2_density_u(double u, double df) {
  // 2u * f(u^2; df), f the chi-square pdf.
  const double a = df / 2.0;
  const double t = u * u;
  if (t <= 0.0) return 0.0;
  const double log_f = (a - 1.0) * std::log(t) - t / 2.0 - a * std::log(2.0) - std::lgamma(a);
  return 2.0 * u * std::exp(log_f);
}

inline double simpson_rule(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(double df, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth) {
  const double m = (a + b) / 2.0;
  const double lm = (a + m) / 2.0;
  const double rm = (m + b) / 2.0;
  const double flm = chi2_density_u(lm, df);
  const double frm = chi2_density_u(rm, df);
  const double left = simpson_rule(a, m, fa, flm, fm);
  const double right = simpson_rule(m, b, fm, frm, fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(df, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(df, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate_chi2_u(double df, double a, double b, double tol) {
  const double fa = chi2_density_u(a, df);
  const double fb = chi2_density_u(b, df);
  const double m = (a + b) / 2.0;
  const double fm = chi2_density_u(m, df);
  const double whole = simpson_rule(a, b, fa, fm, fb);
  return adaptive_simpson(df, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

inline double chi2_sf_quadrature(double x, int df) {
  if (x <= 0.0) return 1.0;
  const double d = double(df);
  // Integrate the upper tail to a point where the density is negligible.
  const double upper_t = std::max(x, d) + 200.0 + 25.0 * std::sqrt(2.0 * d);
  const double lo = std::sqrt(x);
  const double hi = std::sqrt(upper_t);
  // Split at the mode region to help the recursion.
  const double mid = std::clamp(std::sqrt(std::max(d, 1.0)), lo, hi);
  double total = 0.0;
  if (mid > lo) total += detail::integrate_chi2_u(d, lo, mid, 1e-13);
  total += detail::integrate_chi2_u(d, mid, hi, 1e-13);
  return std::min(1.0, std::max(0.0, total));
}

// ---------------------------------------------------------------------------
// Optimal one-to-one matching oracle for drift scoring: maximum bipartite
// matching between detections and actuals within the tolerance window.

inline int optimal_match_count(const std::vector<std::int64_t>& detected,
                               const std::vector<std::int64_t>& actual, std::int64_t et) {
  std::vector<int> match_of_actual(actual.size(), -1);
  std::vector<bool> visited;

  std::function<bool(std::size_t)> try_assign = [&](std::size_t d) -> bool {
    for (std::size_t a = 0; a < actual.size(); ++a) {
      if (visited[a] || std::llabs(actual[a] - detected[d]) > et) continue;
      visited[a] = true;
      if (match_of_actual[a] < 0 || try_assign(std::size_t(match_of_actual[a]))) {
        match_of_actual[a] = int(d);
        return true;
      }
    }
    return false;
  };

  int matched = 0;
  for (std::size_t d = 0; d < detected.size(); ++d) {
    visited.assign(actual.size(), false);
    if (try_assign(d)) ++matched;
  }
  return matched;
}

}  // namespace testsupport
