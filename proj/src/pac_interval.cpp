#include "pacvi/pac_interval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pacvi/errors.hpp"
#include "pacvi/exact_binomial.hpp"

namespace pacvi {
namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("sigma must be positive and finite, got " + std::to_string(sigma));
  }
}

}  // namespace

PacTarget::PacTarget(double epsilon, double delta) : epsilon_(epsilon), delta_(delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidArgument("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

double normalized_score(const CalibrationRecord& record) {
  check_sigma(record.prediction.sigma);
  return std::abs(record.y - record.prediction.mu) / record.prediction.sigma;
}

std::optional<std::size_t> required_covered_count(std::size_t n, const PacTarget& target) {
  if (n == 0) throw EmptyInput("calibration set is empty");
  const auto nn = static_cast<std::int64_t>(n);
  const double goal = 1.0 - target.epsilon();
  if (cp_lower_bound(nn, nn, target.delta()) < goal) return std::nullopt;

  // Invariant: bound(lo) < goal <= bound(hi). bound(0) = 0 < goal.
  std::size_t lo = 0;
  std::size_t hi = n;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (cp_lower_bound(static_cast<std::int64_t>(mid), nn, target.delta()) >= goal) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

CalibrationResult calibrate_scores(std::vector<double> scores, const PacTarget& target) {
  if (scores.empty()) throw EmptyInput("calibration set is empty");
  CalibrationResult result{std::nullopt, target, scores.size(), 0, false};
  const auto k = required_covered_count(scores.size(), target);
  if (!k) return result;

  const auto kth = scores.begin() + static_cast<std::ptrdiff_t>(*k - 1);
  std::nth_element(scores.begin(), kth, scores.end());
  result.c_star = *kth;
  result.k_required = *k;
  result.feasible = true;
  return result;
}

CalibrationResult calibrate(std::span<const CalibrationRecord> records, const PacTarget& target) {
  if (records.empty()) throw EmptyInput("calibration set is empty");
  std::vector<double> scores;
  scores.reserve(records.size());
  for (const auto& r : records) scores.push_back(normalized_score(r));
  return calibrate_scores(std::move(scores), target);
}

Interval build_interval(const GaussianPrediction& pred, double c) {
  check_sigma(pred.sigma);
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("interval scale must be finite and >= 0, got " + std::to_string(c));
  }
  return Interval::centered(pred.mu, c * pred.sigma);
}

Interval clip_interval(const Interval& interval, double lo, double hi) {
  if (lo > hi) throw InvalidArgument("clip range is empty");
  return Interval::from_bounds(std::clamp(interval.lower(), lo, hi),
                               std::clamp(interval.upper(), lo, hi));
}

}  // namespace pacvi
