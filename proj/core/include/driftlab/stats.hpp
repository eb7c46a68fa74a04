#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "driftlab/dfr_window.hpp"

namespace driftlab {

/**
 * @brief 2 x k frequency table of relation types.
 *
 * Row 0 is the reference window, row 1 the detection window. Columns are
 * the union of types with a positive total, ordered lexicographically by
 * (source label, target label).
 */
struct ContingencyTable {
  std::vector<DfRelation> columns;
  std::vector<std::array<std::int64_t, 2>> cells;  // per column {ref, det}
  std::array<std::int64_t, 2> row_totals{0, 0};
  std::int64_t grand_total = 0;

  std::size_t column_count() const { return columns.size(); }
  std::int64_t col_total(std::size_t j) const { return cells[j][0] + cells[j][1]; }
  std::optional<std::size_t> column_of(const DfRelation& r) const;
};

/// Throws std::invalid_argument when both multisets are empty.
ContingencyTable build_contingency(const RelationCounts& ref, const RelationCounts& det,
                                   std::span<const std::string> labels);

struct GResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;  // k - 1 for a 2 x k table
};

/// Likelihood-ratio statistic G = 2 * sum O*ln(O/E); zero cells contribute 0.
GResult g_statistic(const ContingencyTable& t);

/**
 * @brief Chi-square upper-tail probability, Q(df/2, x/2).
 *
 * Regularized upper incomplete gamma via series / continued fraction;
 * absolute error below 1e-8 for x in [0, 200], df in [1, 500]. Throws for
 * df < 1.
 */
double chi_square_sf(double x, int df);

struct AsrValue {
  double value = 0.0;
  bool degenerate = false;  // zero denominator (a margin equals the total)
};

/// Adjusted standardized residual of one cell:
/// (O - E) / sqrt(E * (1 - row/N) * (1 - col/N)).
AsrValue asr(const ContingencyTable& t, std::size_t row, std::size_t column);

/**
 * @brief One window-pair test: G, p-value and the detection-row ASR of
 * every column.
 *
 * degenerate means the pair cannot support a test (fewer than two relation
 * types); such an outcome never passes validation.
 */
struct TestOutcome {
  double g = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::vector<DfRelation> columns;     // same order as detection_asr
  std::vector<double> detection_asr;   // row-1 ASR per column
  bool degenerate = false;

  /// ASR of r's detection cell; 0 when r is not a column.
  double asr_of(const DfRelation& r) const;
};

TestOutcome evaluate_window_pair(const RelationCounts& ref, const RelationCounts& det,
                                 std::span<const std::string> labels);

enum class Direction { forward, backward };

/**
 * @brief Memoizes window-pair tests by reference-window start position.
 *
 * One instance per search direction (the default wiring); an outcome, once
 * stored, is immutable. Not internally synchronized.
 */
class TestCache {
 public:
  explicit TestCache(Direction d) : direction_(d) {}

  Direction direction() const { return direction_; }

  template <typename F>
  const TestOutcome& get_or_compute(std::size_t ref_start, F&& compute) {
    auto it = map_.find(ref_start);
    if (it != map_.end()) return it->second;
    ++computed_;
    return map_.emplace(ref_start, compute()).first->second;
  }

  const TestOutcome* find(std::size_t ref_start) const {
    auto it = map_.find(ref_start);
    return it == map_.end() ? nullptr : &it->second;
  }

  /// Number of outcomes actually computed (cache misses).
  std::size_t computed_count() const { return computed_; }
  std::size_t size() const { return map_.size(); }

 private:
  Direction direction_;
  std::unordered_map<std::size_t, TestOutcome> map_;
  std::size_t computed_ = 0;
};

/// Memoized window-pair test keyed by (cache direction, ref_start).
const TestOutcome& cached_test(TestCache& cache, std::size_t ref_start,
                               const RelationCounts& ref, const RelationCounts& det,
                               std::span<const std::string> labels);

}  // namespace driftlab
