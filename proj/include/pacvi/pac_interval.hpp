#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pacvi/types.hpp"

namespace pacvi {

struct CalibrationRecord {
  GaussianPrediction prediction;
  double y = 0.0;
};

// Coverage target 1 - epsilon, certified with probability 1 - delta.
class PacTarget {
 public:
  PacTarget(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

 private:
  double epsilon_;
  double delta_;
};

struct CalibrationResult {
  std::optional<double> c_star;  // unset when infeasible
  PacTarget target;
  std::size_t n = 0;
  std::size_t k_required = 0;    // 0 when infeasible
  bool feasible = false;
};

/// |y - mu| / sigma: the smallest scale c whose interval covers the record.
double normalized_score(const CalibrationRecord& record);

/// Smallest k in [1, n] with cp_lower_bound(k, n, delta) >= 1 - epsilon, or
/// nullopt when even k = n falls short. Binary search; relies on the bound
/// being nondecreasing in k.
std::optional<std::size_t> required_covered_count(std::size_t n, const PacTarget& target);

/// Minimal scale c* whose Clopper-Pearson lower coverage bound on the
/// calibration set reaches 1 - epsilon.
///
/// The certified count #{i : s_i <= c} only changes at the order statistics
/// of the scores, so c* is the k_required-th smallest score. Ties among
/// scores can only raise the covered count at that scale. An unreachable
/// target is reported through `feasible`, not thrown.
CalibrationResult calibrate(std::span<const CalibrationRecord> records, const PacTarget& target);

/// Same as calibrate() on precomputed normalized scores.
CalibrationResult calibrate_scores(std::vector<double> scores, const PacTarget& target);

/// [mu - c*sigma, mu + c*sigma].
Interval build_interval(const GaussianPrediction& pred, double c);

/// Intersect with [lo, hi] for display. Never feed the result back into
/// calibration.
Interval clip_interval(const Interval& interval, double lo, double hi);

}  // namespace pacvi
