#pragma once

#include <cstddef>
#include <span>

#include "pacvi/types.hpp"

namespace pacvi {

// Split-conformal residual quantile. q_hat is +inf when the conformal rank
// exceeds the calibration size.
struct ConformalQuantile {
  double q_hat = 0.0;
  double alpha = 0.1;
  std::size_t n = 0;

  bool finite() const;
};

// q_hat = r-th smallest residual, r = ceil((n + 1)(1 - alpha)).
ConformalQuantile vcp_calibrate(std::span<const double> residuals, double alpha);

// Constant-width interval around a point prediction; Interval::unbounded()
// for an infinite quantile.
Interval vcp_interval(double point_prediction, const ConformalQuantile& q);

}  // namespace pacvi
