#include "driftlab/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "driftlab/rng.hpp"
#include "test_support.hpp"

using namespace driftlab;

namespace {

const std::vector<std::string> kLabels = {"A", "B", "C", "D", "E", "F"};

RelationCounts counts(std::initializer_list<std::pair<DfRelation, std::int64_t>> items) {
  RelationCounts m;
  for (const auto& [r, n] : items) m[r] = n;
  return m;
}

// 2 x k table straight from cell values, bypassing build_contingency.
ContingencyTable make_table(const std::vector<std::array<std::int64_t, 2>>& cells) {
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

}  // namespace

TEST(BuildContingency, SingleSharedColumn) {
  auto t = build_contingency(counts({{{0, 1}, 5}}), counts({{{0, 1}, 5}}), kLabels);
  ASSERT_EQ(t.column_count(), 1u);
  EXPECT_EQ(t.cells[0][0], 5);
  EXPECT_EQ(t.cells[0][1], 5);
  EXPECT_EQ(t.grand_total, 10);
}

TEST(BuildContingency, DisjointTypes) {
  auto t = build_contingency(counts({{{0, 1}, 3}}), counts({{{1, 2}, 4}}), kLabels);
  ASSERT_EQ(t.column_count(), 2u);
  // Lexicographic by label: A>B before B>C.
  EXPECT_EQ(t.columns[0], (DfRelation{0, 1}));
  EXPECT_EQ(t.columns[1], (DfRelation{1, 2}));
  EXPECT_EQ(t.cells[0][0], 3);
  EXPECT_EQ(t.cells[0][1], 0);
  EXPECT_EQ(t.cells[1][0], 0);
  EXPECT_EQ(t.cells[1][1], 4);
}

TEST(BuildContingency, ZeroTotalColumnDropped) {
  auto t = build_contingency(counts({{{0, 1}, 2}, {{2, 3}, 0}}),
                             counts({{{0, 1}, 1}}), kLabels);
  ASSERT_EQ(t.column_count(), 1u);
  EXPECT_EQ(t.columns[0], (DfRelation{0, 1}));
}

TEST(BuildContingency, BothEmptyThrows) {
  EXPECT_THROW(build_contingency({}, {}, kLabels), std::invalid_argument);
  EXPECT_THROW(build_contingency(counts({{{0, 1}, 0}}), {}, kLabels),
               std::invalid_argument);
}

TEST(BuildContingency, ColumnOrderIsLexicographicByLabel) {
  // Insert in scrambled id order; expect label order A>B, A>C, B>A.
  auto t = build_contingency(counts({{{1, 0}, 1}, {{0, 2}, 1}, {{0, 1}, 1}}),
                             counts({{{0, 1}, 2}}), kLabels);
  ASSERT_EQ(t.column_count(), 3u);
  EXPECT_EQ(t.columns[0], (DfRelation{0, 1}));
  EXPECT_EQ(t.columns[1], (DfRelation{0, 2}));
  EXPECT_EQ(t.columns[2], (DfRelation{1, 0}));
}

TEST(GStatistic, IdenticalRowsGiveZero) {
  const auto g = g_statistic(make_table({{5, 5}, {5, 5}}));
  EXPECT_DOUBLE_EQ(g.statistic, 0.0);
  EXPECT_EQ(g.degrees_of_freedom, 1);
}

TEST(GStatistic, HandExpandedValue) {
  // 2*(60*ln 1.5 + 20*ln 0.5) = 20.9299257...
  const auto g = g_statistic(make_table({{30, 10}, {10, 30}}));
  const double expected = 2.0 * (60.0 * std::log(1.5) + 20.0 * std::log(0.5));
  EXPECT_NEAR(g.statistic, expected, 1e-12);
  EXPECT_NEAR(g.statistic, 20.9299257, 1e-6);
  EXPECT_EQ(g.degrees_of_freedom, 1);
}

TEST(GStatistic, ProportionalRowsGiveZero) {
  const auto g = g_statistic(make_table({{2, 4}, {3, 6}, {5, 10}}));
  EXPECT_NEAR(g.statistic, 0.0, 1e-12);
  EXPECT_EQ(g.degrees_of_freedom, 2);
}

TEST(GStatistic, InvariantUnderRowSwapAndColumnPermutation) {
  const auto base = g_statistic(make_table({{7, 2}, {1, 9}, {4, 4}}));
  const auto swapped = g_statistic(make_table({{2, 7}, {9, 1}, {4, 4}}));
  const auto permuted = g_statistic(make_table({{4, 4}, {7, 2}, {1, 9}}));
  EXPECT_NEAR(base.statistic, swapped.statistic, 1e-12);
  EXPECT_NEAR(base.statistic, permuted.statistic, 1e-12);
}

TEST(ChiSquareSf, BoundaryAndErrors) {
  for (int df : {1, 2, 5, 100, 500}) EXPECT_DOUBLE_EQ(chi_square_sf(0.0, df), 1.0);
  EXPECT_THROW(chi_square_sf(1.0, 0), std::invalid_argument);
  EXPECT_THROW(chi_square_sf(-1.0, 1), std::invalid_argument);
}

TEST(ChiSquareSf, CriticalValueNearFivePercent) {
  const double oracle = testsupport::chi2_sf_quadrature(3.841, 1);
  EXPECT_NEAR(chi_square_sf(3.841, 1), 0.0500, 1e-3);
  EXPECT_NEAR(chi_square_sf(3.841, 1), oracle, 1e-8);
}

TEST(ChiSquareSf, LargeStatisticTinyTail) {
  EXPECT_LT(chi_square_sf(20.9299257, 1), 1e-5);
  EXPECT_NEAR(chi_square_sf(20.9299257, 1), testsupport::chi2_sf_quadrature(20.9299257, 1),
              1e-8);
}

TEST(ChiSquareSf, MatchesQuadratureOracleAcrossDomain) {
  const double xs[] = {0.1, 0.5, 1.0, 3.841, 10.0, 50.0, 120.0, 200.0};
  const int dfs[] = {1, 2, 3, 5, 10, 50, 100, 250, 500};
  for (int df : dfs) {
    for (double x : xs) {
      const double oracle = testsupport::chi2_sf_quadrature(x, df);
      EXPECT_NEAR(chi_square_sf(x, df), oracle, 1e-8)
          << "x=" << x << " df=" << df;
    }
  }
}

TEST(ChiSquareSf, DecreasingInX) {
  // Strictly decreasing wherever doubles can resolve it; the function
  // saturates at 1 for x far below df and at 0 in the deep tail.
  for (int df : {1, 4, 30}) {
    double prev = chi_square_sf(0.0, df);
    for (double x = 0.5; x < 80.0; x += 0.5) {
      const double cur = chi_square_sf(x, df);
      EXPECT_LE(cur, prev) << "x=" << x << " df=" << df;
      if (prev < 1.0 - 1e-12 && prev > 1e-300) {
        EXPECT_LT(cur, prev) << "x=" << x << " df=" << df;
      }
      prev = cur;
    }
  }
}

TEST(Asr, HandComputedCell) {
  const auto t = make_table({{30, 10}, {10, 30}});
  const auto cell = asr(t, 0, 0);
  EXPECT_FALSE(cell.degenerate);
  EXPECT_NEAR(cell.value, 10.0 / std::sqrt(5.0), 1e-9);  // 4.4721...
}

TEST(Asr, ZeroWhenObservedEqualsExpected) {
  const auto t = make_table({{5, 5}, {5, 5}});
  EXPECT_NEAR(asr(t, 0, 0).value, 0.0, 1e-12);
  EXPECT_NEAR(asr(t, 1, 1).value, 0.0, 1e-12);
}

TEST(Asr, RowAntisymmetry) {
  const auto t = make_table({{7, 2}, {1, 9}, {4, 4}, {0, 3}});
  for (std::size_t j = 0; j < t.column_count(); ++j) {
    EXPECT_NEAR(asr(t, 0, j).value, -asr(t, 1, j).value, 1e-9);
    EXPECT_NEAR(std::fabs(asr(t, 0, j).value), std::fabs(asr(t, 1, j).value), 1e-9);
  }
}

TEST(Asr, DegenerateWhenRowHoldsEverything) {
  const auto t = make_table({{3, 0}, {5, 0}});  // detection row empty
  const auto cell = asr(t, 0, 0);
  EXPECT_TRUE(cell.degenerate);
  EXPECT_DOUBLE_EQ(cell.value, 0.0);
}

TEST(EvaluateWindowPair, SingleTypeIsDegenerate) {
  const auto out = evaluate_window_pair(counts({{{0, 1}, 8}}), counts({{{0, 1}, 9}}),
                                        kLabels);
  EXPECT_TRUE(out.degenerate);
  EXPECT_DOUBLE_EQ(out.p_value, 1.0);
}

TEST(EvaluateWindowPair, AsrLookupForMissingTypeIsZero) {
  const auto out = evaluate_window_pair(counts({{{0, 1}, 8}, {{1, 2}, 2}}),
                                        counts({{{0, 1}, 2}, {{1, 2}, 8}}), kLabels);
  EXPECT_FALSE(out.degenerate);
  EXPECT_DOUBLE_EQ(out.asr_of(DfRelation{4, 5}), 0.0);
  EXPECT_GT(out.asr_of(DfRelation{1, 2}), 0.0);  // count grew in detection row
}

TEST(TestCacheSuite, SameKeyComputedOnce) {
  TestCache cache(Direction::forward);
  const auto ref = counts({{{0, 1}, 8}, {{1, 2}, 2}});
  const auto det = counts({{{0, 1}, 2}, {{1, 2}, 8}});
  const TestOutcome& first = cached_test(cache, 42, ref, det, kLabels);
  const TestOutcome& second = cached_test(cache, 42, ref, det, kLabels);
  EXPECT_EQ(&first, &second);
  EXPECT_EQ(cache.computed_count(), 1u);
  cached_test(cache, 43, ref, det, kLabels);
  EXPECT_EQ(cache.computed_count(), 2u);
  EXPECT_EQ(cache.size(), 2u);
}

// Sanity check against a permutation test: conclusions at the 0.05 level
// should agree on most small 2x2 tables. Not exact agreement; the G
// statistic is only asymptotically chi-square.
TEST(GTestVsPermutation, ConclusionsMostlyAgree) {
  Rng rng(20240817);
  int agreements = 0;
  const int tables = 50;
  for (int t = 0; t < tables; ++t) {
    std::array<std::array<std::int64_t, 2>, 2> cell{};
    for (auto& row : cell)
      for (auto& v : row) v = 5 + std::int64_t(rng.uniform_index(36));

    const auto table = make_table({{cell[0][0], cell[1][0]}, {cell[0][1], cell[1][1]}});
    const auto g = g_statistic(table);
    const bool chi_significant = chi_square_sf(g.statistic, g.degrees_of_freedom) < 0.05;

    // Permutation: shuffle column labels over the pooled observations. The
    // pooled list starts in observed order: row 0's items first.
    const std::int64_t n = table.grand_total;
    const std::int64_t row0 = table.row_totals[0];
    std::vector<int> col_of;
    col_of.reserve(std::size_t(n));
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::int64_t i = 0; i < table.cells[c][r]; ++i) col_of.push_back(int(c));

    const auto g_of = [&](const std::vector<int>& cols) {
      std::array<std::array<double, 2>, 2> o{};
      for (std::int64_t i = 0; i < n; ++i) o[i < row0 ? 0 : 1][std::size_t(cols[std::size_t(i)])] += 1.0;
      double stat = 0.0;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          if (o[std::size_t(r)][std::size_t(c)] <= 0.0) continue;
          const double rt = o[std::size_t(r)][0] + o[std::size_t(r)][1];
          const double ct = o[0][std::size_t(c)] + o[1][std::size_t(c)];
          const double e = rt * ct / double(n);
          stat += o[std::size_t(r)][std::size_t(c)] * std::log(o[std::size_t(r)][std::size_t(c)] / e);
        }
      return 2.0 * stat;
    };

    const double observed = g_of(col_of);
    int at_least = 0;
    const int shuffles = 2000;
    std::vector<int> shuffled = col_of;
    for (int s = 0; s < shuffles; ++s) {
      for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.uniform_index(i)]);
      if (g_of(shuffled) >= observed - 1e-12) ++at_least;
    }
    const bool perm_significant = double(at_least) / shuffles < 0.05;
    if (perm_significant == chi_significant) ++agreements;
  }
  EXPECT_GE(agreements, 48) << "agreement below 95% on " << tables << " tables";
}
