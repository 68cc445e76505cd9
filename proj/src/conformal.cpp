#include "pacvi/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pacvi/errors.hpp"

namespace pacvi {

bool ConformalQuantile::finite() const { return std::isfinite(q_hat); }

ConformalQuantile vcp_calibrate(std::span<const double> residuals, double alpha) {
  if (residuals.empty()) throw EmptyInput("conformal calibration needs at least one residual");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  for (double r : residuals) {
    if (!(r >= 0.0)) throw InvalidArgument("residuals must be nonnegative");
  }
  const std::size_t n = residuals.size();
  // The product is rounded up; subtract a few ulps first so that values like
  // 5 * 0.8 = 4.000000000000001 do not bump the rank.
  const double exact = static_cast<double>(n + 1) * (1.0 - alpha);
  const auto rank = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));

  ConformalQuantile q{std::numeric_limits<double>::infinity(), alpha, n};
  if (rank == 0) {
    q.q_hat = 0.0;
  } else if (rank <= n) {
    std::vector<double> sorted(residuals.begin(), residuals.end());
    const auto kth = sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(sorted.begin(), kth, sorted.end());
    q.q_hat = *kth;
  }
  return q;
}

Interval vcp_interval(double point_prediction, const ConformalQuantile& q) {
  if (!q.finite()) return Interval::unbounded();
  return Interval::centered(point_prediction, q.q_hat);
}

}  // namespace pacvi
