#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pacvi/types.hpp"

namespace pacvi {

// Categorized visual-acuity level 0..10; level k stands for decimal acuity k/10.
class VaLabel {
 public:
  explicit VaLabel(int klass);
  // Rounds to the nearest level and clamps into [0, 10].
  static VaLabel from_continuous(double y);

  int klass() const { return klass_; }
  double decimal_acuity() const { return klass_ / 10.0; }

 private:
  int klass_;
};

struct EvaluatedExample {
  double y = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
  std::optional<Interval> interval;

  bool covered() const { return interval && interval->contains(y); }
  double abs_error() const;
};

// Percentages of letter-score errors in [0, 5], [6, 10] and [11, inf).
struct ErrorRangeHistogram {
  double pct_0_5 = 0.0;
  double pct_6_10 = 0.0;
  double pct_11_plus = 0.0;
};

struct BinSummary {
  std::size_t count = 0;
  double mean_abs_error = 0.0;
  double mean_sigma = 0.0;
};

// Percentage of examples whose interval contains y (endpoints count).
double coverage_rate(std::span<const EvaluatedExample> examples);

// Mean interval width; throws InvalidArgument if any interval is unbounded.
double average_width(std::span<const EvaluatedExample> examples);

// Population variance of interval widths.
double width_variance(std::span<const EvaluatedExample> examples);

double mean_absolute_error(std::span<const EvaluatedExample> examples);

// Per-class MAE averaged with equal class weight; class = VaLabel of y.
double macro_mae(std::span<const EvaluatedExample> examples);

// 0 -> 0, {1,2} -> 1, {3..7} -> 2, {8,9,10} -> 3.
int map_to_4level(const VaLabel& label);

// Per-4-level-class fraction of intervals containing the 11-level y,
// averaged over present classes, in percent.
double interval_ma_acc(std::span<const EvaluatedExample> examples);

inline constexpr double kMinDecimalAcuity = 0.01;

// L = 85 + 50 * log10(F) for F in (0, 1].
double letter_score(double decimal_acuity);

// Letter score of a label-scale value: clamp to [0, 10], divide by 10 and
// floor at kMinDecimalAcuity. `floored` reports whether the floor applied.
double letter_score_from_label(double label, bool* floored = nullptr);

// Errors are rounded to the nearest integer before bucketing.
ErrorRangeHistogram error_range_distribution(std::span<const double> letter_errors);

// Sort by absolute error, split into n_bins contiguous groups whose sizes
// differ by at most one (earlier bins take the remainder).
std::vector<BinSummary> equal_mass_bins(std::span<const EvaluatedExample> examples,
                                        std::size_t n_bins);

// Spearman rank correlation with average ranks for ties.
double spearman_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace pacvi
