#pragma once

#include <cstdint>

namespace pacvi {

// k successes out of n trials. Construction validates 0 <= k <= n, n >= 1.
class BinomialObservation {
 public:
  BinomialObservation(std::int64_t successes, std::int64_t trials);

  std::int64_t successes() const { return successes_; }
  std::int64_t trials() const { return trials_; }

 private:
  std::int64_t successes_;
  std::int64_t trials_;
};

// Significance level delta in the open interval (0, 1).
class ConfidenceLevel {
 public:
  explicit ConfidenceLevel(double delta);

  double delta() const { return delta_; }

 private:
  double delta_;
};

/// Natural log of Pr[Bin(n, p) >= k].
///
/// The tail is summed outward from max(k, mode) with ratio recurrences so
/// that no term overflows for n in the tens of thousands; only the anchor
/// term goes through log-gamma. Returns -inf when the tail is exactly zero.
double binomial_log_survival(std::int64_t k, std::int64_t n, double p);

/// One-sided Clopper-Pearson lower confidence bound.
///
/// Largest p in [0, 1] with Pr[Bin(n, p) >= k] <= delta, located by bisection
/// on the exact tail to 1e-12 in p. k = 0 gives 0 and k = n uses the closed
/// form delta^(1/n). Throws InvalidArgument through the wrapper types.
double cp_lower_bound(const BinomialObservation& obs, const ConfidenceLevel& delta);
double cp_lower_bound(std::int64_t k, std::int64_t n, double delta);

/// Phi(z) for the standard normal.
double std_normal_cdf(double z);

/// Inverse of std_normal_cdf; throws InvalidArgument unless 0 < p < 1.
double std_normal_quantile(double p);

}  // namespace pacvi
