#pragma once

#include <cmath>
#include <limits>

namespace pacvi {

// One model output: predicted mean and standard deviation, in label units.
// sigma > 0 is checked where predictions enter an operation, not here, so the
// struct stays an aggregate.
struct GaussianPrediction {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Closed interval [lower, upper].
///
/// The half-width is stored next to the endpoints: a symmetric interval built
/// from (center, radius) reports width 2 * radius exactly, whereas
/// upper - lower would pick up rounding that depends on the center.
/// Infinite endpoints mark an unbounded set.
class Interval {
 public:
  Interval() = default;

  // Requires lower <= upper (not checked for NaN-free callers' speed).
  static Interval from_bounds(double lower, double upper) {
    return Interval(lower, upper, 0.5 * (upper - lower));
  }
  static Interval centered(double center, double radius) {
    return Interval(center - radius, center + radius, radius);
  }
  static Interval unbounded() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return Interval(-inf, inf, inf);
  }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double width() const { return 2.0 * half_width_; }
  bool bounded() const { return std::isfinite(lower_) && std::isfinite(upper_); }
  bool contains(double y) const { return lower_ <= y && y <= upper_; }

 private:
  Interval(double lower, double upper, double half_width)
      : lower_(lower), upper_(upper), half_width_(half_width) {}

  double lower_ = 0.0;
  double upper_ = 0.0;
  double half_width_ = 0.0;
};

}  // namespace pacvi
