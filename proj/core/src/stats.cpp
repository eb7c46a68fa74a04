#include "driftlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace driftlab {

std::optional<std::size_t> ContingencyTable::column_of(const DfRelation& r) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == r) return j;
  return std::nullopt;
}

ContingencyTable build_contingency(const RelationCounts& ref, const RelationCounts& det,
                                   std::span<const std::string> labels) {
  if (ref.empty() && det.empty())
    throw std::invalid_argument("contingency table needs at least one relation occurrence");

  const auto count_in = [](const RelationCounts& m, const DfRelation& r) -> std::int64_t {
    auto it = m.find(r);
    return it == m.end() ? 0 : it->second;
  };

  ContingencyTable t;
  t.columns.reserve(ref.size() + det.size());
  for (const auto& [r, n] : ref)
    if (n > 0) t.columns.push_back(r);
  for (const auto& [r, n] : det)
    if (n > 0 && count_in(ref, r) <= 0) t.columns.push_back(r);

  std::sort(t.columns.begin(), t.columns.end(),
            [&](const DfRelation& a, const DfRelation& b) {
              const auto& as = labels[std::size_t(a.source)];
              const auto& bs = labels[std::size_t(b.source)];
              if (as != bs) return as < bs;
              return labels[std::size_t(a.target)] < labels[std::size_t(b.target)];
            });

  t.cells.reserve(t.columns.size());
  for (const auto& r : t.columns) {
    const std::int64_t rc = std::max<std::int64_t>(0, count_in(ref, r));
    const std::int64_t dc = std::max<std::int64_t>(0, count_in(det, r));
    t.cells.push_back({rc, dc});
    t.row_totals[0] += rc;
    t.row_totals[1] += dc;
  }
  t.grand_total = t.row_totals[0] + t.row_totals[1];
  if (t.columns.empty())
    throw std::invalid_argument("contingency table needs at least one relation occurrence");
  return t;
}

GResult g_statistic(const ContingencyTable& t) {
  GResult result;
  result.degrees_of_freedom = int(t.column_count()) - 1;
  const double n = double(t.grand_total);
  double g = 0.0;
  for (std::size_t j = 0; j < t.column_count(); ++j) {
    const double col = double(t.col_total(j));
    for (std::size_t i = 0; i < 2; ++i) {
      const double o = double(t.cells[j][i]);
      if (o <= 0) continue;  // lim x->0 of x ln x is 0
      const double e = double(t.row_totals[i]) * col / n;
      g += o * std::log(o / e);
    }
  }
  result.statistic = std::max(0.0, 2.0 * g);
  return result;
}

namespace {

// Regularized incomplete gamma, Numerical Recipes style. Converges over the
// domain the detector uses (a = df/2 <= 250, x = G/2).
double lower_gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double upper_gamma_cf(double a, double x) {
  // Lentz's algorithm for the continued fraction of Q(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_sf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi_square_sf requires df >= 1");
  if (!(x >= 0.0)) throw std::invalid_argument("chi_square_sf requires x >= 0");
  if (x == 0.0) return 1.0;
  const double a = double(df) / 2.0;
  const double h = x / 2.0;
  if (h < a + 1.0) return std::clamp(1.0 - lower_gamma_series(a, h), 0.0, 1.0);
  return std::clamp(upper_gamma_cf(a, h), 0.0, 1.0);
}

AsrValue asr(const ContingencyTable& t, std::size_t row, std::size_t column) {
  if (row > 1 || column >= t.column_count())
    throw std::out_of_range("asr cell out of range");
  const double n = double(t.grand_total);
  const double rt = double(t.row_totals[row]);
  const double ct = double(t.col_total(column));
  const double e = rt * ct / n;
  const double denom_sq = e * (1.0 - rt / n) * (1.0 - ct / n);
  if (denom_sq <= 0.0) return {0.0, true};
  const double o = double(t.cells[column][row]);
  return {(o - e) / std::sqrt(denom_sq), false};
}

double TestOutcome::asr_of(const DfRelation& r) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == r) return detection_asr[j];
  return 0.0;
}

TestOutcome evaluate_window_pair(const RelationCounts& ref, const RelationCounts& det,
                                 std::span<const std::string> labels) {
  TestOutcome out;
  if (ref.empty() && det.empty()) {
    out.degenerate = true;
    return out;
  }
  ContingencyTable t = build_contingency(ref, det, labels);
  if (t.column_count() < 2) {
    // Single relation type: no independence test is possible. Treated as a
    // failed test rather than a passed one.
    out.degenerate = true;
    out.columns = std::move(t.columns);
    out.detection_asr.assign(out.columns.size(), 0.0);
    return out;
  }
  const GResult g = g_statistic(t);
  out.g = g.statistic;
  out.df = g.degrees_of_freedom;
  out.p_value = chi_square_sf(g.statistic, g.degrees_of_freedom);
  out.columns = t.columns;
  out.detection_asr.reserve(t.column_count());
  for (std::size_t j = 0; j < t.column_count(); ++j)
    out.detection_asr.push_back(asr(t, 1, j).value);
  return out;
}

const TestOutcome& cached_test(TestCache& cache, std::size_t ref_start,
                               const RelationCounts& ref, const RelationCounts& det,
                               std::span<const std::string> labels) {
  return cache.get_or_compute(ref_start,
                              [&] { return evaluate_window_pair(ref, det, labels); });
}

}  // namespace driftlab
