#include "pacvi/va_metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "pacvi/errors.hpp"
#include "pacvi/rng.hpp"

namespace pacvi {
namespace {

EvaluatedExample with_interval(double y, double lo, double hi) {
  return {y, 0.5 * (lo + hi), 1.0, Interval::from_bounds(lo, hi)};
}

TEST(CoverageRate, Basics) {
  const std::vector<EvaluatedExample> all = {with_interval(1, 0, 2), with_interval(5, 4, 6)};
  EXPECT_EQ(coverage_rate(all), 100.0);
  const std::vector<EvaluatedExample> half = {with_interval(1, 0, 2), with_interval(9, 4, 6),
                                              with_interval(5, 4, 6), with_interval(-1, 0, 2)};
  EXPECT_EQ(coverage_rate(half), 50.0);
  const std::vector<EvaluatedExample> edge = {with_interval(2, 0, 2), with_interval(4, 4, 6)};
  EXPECT_EQ(coverage_rate(edge), 100.0);
  EXPECT_THROW(coverage_rate(std::vector<EvaluatedExample>{}), EmptyInput);
  EXPECT_THROW(coverage_rate(std::vector<EvaluatedExample>{{1, 1, 1, std::nullopt}}),
               InvalidArgument);
}

TEST(AverageWidth, Basics) {
  EXPECT_EQ(average_width(std::vector{with_interval(0, 0, 2), with_interval(0, 0, 4)}), 3.0);
  EXPECT_EQ(average_width(std::vector{with_interval(0, 1, 1), with_interval(0, 3, 3)}), 0.0);
  EXPECT_EQ(average_width(std::vector{with_interval(5, 3, 7)}), 4.0);
  EXPECT_THROW(average_width(std::vector<EvaluatedExample>{{0, 0, 1, Interval::unbounded()}}),
               InvalidArgument);
}

TEST(Metrics, PermutationInvariant) {
  Rng rng(1);
  std::vector<EvaluatedExample> ex;
  for (int i = 0; i < 200; ++i) {
    const double lo = rng.uniform(0, 5);
    ex.push_back(with_interval(rng.uniform(0, 10), lo, lo + rng.uniform(0, 5)));
  }
  const double cov = coverage_rate(ex);
  const double width = average_width(ex);
  rng.shuffle(std::span<EvaluatedExample>(ex));
  EXPECT_EQ(coverage_rate(ex), cov);
  EXPECT_NEAR(average_width(ex), width, 1e-12);
}

TEST(MacroMae, Basics) {
  // Class 2 errors {1, 1}, class 7 errors {3}.
  const std::vector<EvaluatedExample> two = {{2, 3, 1, {}}, {2, 1, 1, {}}, {7, 4, 1, {}}};
  EXPECT_EQ(macro_mae(two), 2.0);
  const std::vector<EvaluatedExample> one = {{5, 3, 1, {}}, {5, 9, 1, {}}};
  EXPECT_EQ(macro_mae(one), 3.0);
  const std::vector<EvaluatedExample> perfect = {{5, 5, 1, {}}, {0, 0, 1, {}}};
  EXPECT_EQ(macro_mae(perfect), 0.0);
  EXPECT_THROW(macro_mae(std::vector<EvaluatedExample>{}), EmptyInput);
}

TEST(MacroMae, InvariantToClassSize) {
  std::vector<EvaluatedExample> ex = {{2, 3, 1, {}}, {2, 1.5, 1, {}}, {7, 4, 1, {}}};
  const double before = macro_mae(ex);
  ex.push_back(ex[0]);
  ex.push_back(ex[1]);
  EXPECT_DOUBLE_EQ(macro_mae(ex), before);
}

TEST(MapTo4Level, MatchesTable) {
  const int expected[11] = {0, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3};
  int preimage[4] = {0, 0, 0, 0};
  int prev = 0;
  for (int k = 0; k <= 10; ++k) {
    const int level = map_to_4level(VaLabel(k));
    EXPECT_EQ(level, expected[k]) << k;
    EXPECT_GE(level, prev);
    prev = level;
    ++preimage[level];
  }
  EXPECT_EQ(preimage[0], 1);
  EXPECT_EQ(preimage[1], 2);
  EXPECT_EQ(preimage[2], 5);
  EXPECT_EQ(preimage[3], 3);
  EXPECT_THROW(VaLabel(11), InvalidArgument);
  EXPECT_THROW(VaLabel(-1), InvalidArgument);
}

TEST(VaLabel, FromContinuous) {
  EXPECT_EQ(VaLabel::from_continuous(-3.2).klass(), 0);
  EXPECT_EQ(VaLabel::from_continuous(4.4).klass(), 4);
  EXPECT_EQ(VaLabel::from_continuous(4.6).klass(), 5);
  EXPECT_EQ(VaLabel::from_continuous(12.0).klass(), 10);
}

TEST(IntervalMaAcc, Basics) {
  const std::vector<EvaluatedExample> full = {with_interval(0, -1, 1), with_interval(9, 8, 10)};
  EXPECT_EQ(interval_ma_acc(full), 100.0);
  const std::vector<EvaluatedExample> mixed = {with_interval(0, -1, 1), with_interval(0, 2, 3),
                                               with_interval(9, 8, 10), with_interval(10, 9, 11)};
  EXPECT_EQ(interval_ma_acc(mixed), 75.0);
  const std::vector<EvaluatedExample> none = {with_interval(5, 0, 1), with_interval(4, 6, 7)};
  EXPECT_EQ(interval_ma_acc(none), 0.0);
}

TEST(LetterScore, Values) {
  EXPECT_EQ(letter_score(1.0), 85.0);
  EXPECT_EQ(letter_score(0.1), 35.0);
  EXPECT_NEAR(letter_score(0.5), 69.94850021680094, 1e-12);
  EXPECT_THROW(letter_score(0.0), InvalidArgument);
  EXPECT_THROW(letter_score(-0.5), InvalidArgument);
  bool floored = false;
  EXPECT_EQ(letter_score_from_label(0.0, &floored), letter_score(0.01));
  EXPECT_TRUE(floored);
  EXPECT_EQ(letter_score_from_label(10.0, &floored), 85.0);
  EXPECT_FALSE(floored);
}

TEST(LetterScore, StrictlyIncreasing) {
  double prev = letter_score(0.001);
  for (double f = 0.002; f <= 1.0; f += 0.001) {
    const double l = letter_score(f);
    EXPECT_GT(l, prev);
    prev = l;
  }
}

TEST(ErrorRangeDistribution, Buckets) {
  auto h = error_range_distribution(std::vector<double>{3, 7, 12});
  EXPECT_NEAR(h.pct_0_5, 100.0 / 3, 1e-12);
  EXPECT_NEAR(h.pct_6_10, 100.0 / 3, 1e-12);
  EXPECT_NEAR(h.pct_11_plus, 100.0 / 3, 1e-12);
  h = error_range_distribution(std::vector<double>{0, 0, 0});
  EXPECT_EQ(h.pct_0_5, 100.0);
  // Rounded to the nearest integer: 5.4 -> 5, 5.6 -> 6, 10.4 -> 10, 10.5 -> 11.
  h = error_range_distribution(std::vector<double>{5.4, 5.6, 10.4, 10.5});
  EXPECT_EQ(h.pct_0_5, 25.0);
  EXPECT_EQ(h.pct_6_10, 50.0);
  EXPECT_EQ(h.pct_11_plus, 25.0);
  EXPECT_THROW(error_range_distribution(std::vector<double>{}), EmptyInput);
  EXPECT_THROW(error_range_distribution(std::vector<double>{-1.0}), InvalidArgument);
}

TEST(ErrorRangeDistribution, ReferenceShape) {
  // 33 / 28 / 39 out of 100 errors reproduce the published comparison row.
  std::vector<double> e;
  e.insert(e.end(), 33, 2.0);
  e.insert(e.end(), 28, 8.0);
  e.insert(e.end(), 39, 20.0);
  const auto h = error_range_distribution(e);
  EXPECT_DOUBLE_EQ(h.pct_0_5, 33.0);
  EXPECT_DOUBLE_EQ(h.pct_6_10, 28.0);
  EXPECT_DOUBLE_EQ(h.pct_11_plus, 39.0);
}

TEST(ErrorRangeDistribution, SumsToHundred) {
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> e(1 + rng.index(500));
    for (auto& v : e) v = rng.uniform(0, 30);
    const auto h = error_range_distribution(e);
    EXPECT_NEAR(h.pct_0_5 + h.pct_6_10 + h.pct_11_plus, 100.0, 1e-9);
  }
}

TEST(EqualMassBins, Sizes) {
  std::vector<EvaluatedExample> ex;
  for (int i = 0; i < 10; ++i) ex.push_back({static_cast<double>(i), 0, 1.0 + i, {}});
  auto bins = equal_mass_bins(ex, 5);
  ASSERT_EQ(bins.size(), 5u);
  for (const auto& b : bins) EXPECT_EQ(b.count, 2u);
  EXPECT_EQ(bins[0].mean_abs_error, 0.5);
  EXPECT_EQ(bins[0].mean_sigma, 1.5);

  ex.resize(7);
  bins = equal_mass_bins(ex, 3);
  EXPECT_EQ(bins[0].count, 3u);
  EXPECT_EQ(bins[1].count, 2u);
  EXPECT_EQ(bins[2].count, 2u);
  EXPECT_THROW(equal_mass_bins(ex, 8), InvalidArgument);
  EXPECT_THROW(equal_mass_bins(ex, 0), InvalidArgument);
}

TEST(EqualMassBins, SigmaTracksErrorOnWellSpecifiedData) {
  Rng rng(12);
  std::vector<EvaluatedExample> ex(5000);
  for (auto& e : ex) {
    e.sigma = rng.uniform(0.2, 1.5);
    e.mu = 5.0;
    e.y = e.mu + e.sigma * rng.normal();
  }
  const auto bins = equal_mass_bins(ex, 5);
  int increasing = 0;
  for (std::size_t b = 1; b < bins.size(); ++b) increasing += bins[b].mean_sigma >= bins[b - 1].mean_sigma;
  EXPECT_GE(increasing, 4);
}

TEST(Spearman, Basics) {
  EXPECT_DOUBLE_EQ(spearman_correlation(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}), 1.0);
  EXPECT_DOUBLE_EQ(spearman_correlation(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0);
  EXPECT_NEAR(spearman_correlation(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{1, 3, 2, 4, 5}), 0.9, 1e-12);
  EXPECT_THROW(spearman_correlation(std::vector<double>{1}, std::vector<double>{1, 2}), DimensionMismatch);
}

}  // namespace
}  // namespace pacvi
