#include "pacvi/exact_binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pacvi/errors.hpp"

namespace pacvi {
namespace {

constexpr double kRootTolerance = 1e-12;

// std::lgamma writes the global signgam; the reentrant variant keeps the
// bound computations free of shared state.
double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_binomial_pmf(std::int64_t j, std::int64_t n, double p) {
  const double nd = static_cast<double>(n);
  const double jd = static_cast<double>(j);
  return log_gamma(nd + 1.0) - log_gamma(jd + 1.0) - log_gamma(nd - jd + 1.0) +
         jd * std::log(p) + (nd - jd) * std::log1p(-p);
}

}  // namespace

BinomialObservation::BinomialObservation(std::int64_t successes, std::int64_t trials)
    : successes_(successes), trials_(trials) {
  if (trials < 1) {
    throw InvalidArgument("binomial observation needs n >= 1, got n = " +
                          std::to_string(trials));
  }
  if (successes < 0 || successes > trials) {
    throw InvalidArgument("binomial observation needs 0 <= k <= n, got k = " +
                          std::to_string(successes) + ", n = " + std::to_string(trials));
  }
}

ConfidenceLevel::ConfidenceLevel(double delta) : delta_(delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("significance level must lie in (0, 1), got " +
                          std::to_string(delta));
  }
}

double binomial_log_survival(std::int64_t k, std::int64_t n, double p) {
  if (k <= 0) return 0.0;
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return 0.0;

  const auto mode = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor(static_cast<double>(n + 1) * p)), 0, n);
  const std::int64_t anchor = std::max(k, mode);
  const double odds = p / (1.0 - p);

  // Terms relative to pmf(anchor); they shrink monotonically in both
  // directions because anchor sits at or above the mode.
  double sum = 1.0;
  double term = 1.0;
  for (std::int64_t j = anchor; j < n; ++j) {
    term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  term = 1.0;
  for (std::int64_t j = anchor; j > k; --j) {
    term *= static_cast<double>(j) / static_cast<double>(n - j + 1) / odds;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return log_binomial_pmf(anchor, n, p) + std::log(sum);
}

double cp_lower_bound(const BinomialObservation& obs, const ConfidenceLevel& level) {
  const std::int64_t k = obs.successes();
  const std::int64_t n = obs.trials();
  const double delta = level.delta();
  if (k == 0) return 0.0;
  // Pr[Bin(n, p) >= n] = p^n.
  if (k == n) return std::pow(delta, 1.0 / static_cast<double>(n));

  const double log_delta = std::log(delta);
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > kRootTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_log_survival(k, n, mid) > log_delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

double cp_lower_bound(std::int64_t k, std::int64_t n, double delta) {
  return cp_lower_bound(BinomialObservation(k, n), ConfidenceLevel(delta));
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidArgument("normal quantile needs p in (0, 1), got " + std::to_string(p));
  }
  // Acklam's rational approximation (relative error ~1e-9), then one Halley
  // step against erfc to reach full double precision.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = std_normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace pacvi
