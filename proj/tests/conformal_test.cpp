#include "pacvi/conformal.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "pacvi/errors.hpp"
#include "pacvi/rng.hpp"

namespace pacvi {
namespace {

TEST(VcpCalibrate, RankRule) {
  EXPECT_EQ(vcp_calibrate(std::vector<double>{4, 2, 3, 1}, 0.2).q_hat, 4.0);
  EXPECT_EQ(vcp_calibrate(std::vector<double>{5}, 0.5).q_hat, 5.0);
  const auto q = vcp_calibrate(std::vector<double>{1, 2}, 0.1);
  EXPECT_TRUE(std::isinf(q.q_hat));
  EXPECT_FALSE(q.finite());
  EXPECT_EQ(q.n, 2u);
}

TEST(VcpCalibrate, RankAtNinetyNine) {
  // ceil(100 * 0.7) = 70 -> 70th smallest of 1..99.
  std::vector<double> r(99);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(99 - i);
  EXPECT_EQ(vcp_calibrate(r, 0.3).q_hat, 70.0);
}

TEST(VcpCalibrate, Errors) {
  EXPECT_THROW(vcp_calibrate(std::vector<double>{}, 0.2), EmptyInput);
  EXPECT_THROW(vcp_calibrate(std::vector<double>{1.0}, 0.0), InvalidArgument);
  EXPECT_THROW(vcp_calibrate(std::vector<double>{1.0}, 1.0), InvalidArgument);
  EXPECT_THROW(vcp_calibrate(std::vector<double>{-1.0}, 0.5), InvalidArgument);
}

TEST(VcpInterval, Examples) {
  const ConformalQuantile q{2.0, 0.2, 10};
  auto iv = vcp_interval(5.0, q);
  EXPECT_EQ(iv.lower(), 3.0);
  EXPECT_EQ(iv.upper(), 7.0);
  iv = vcp_interval(0.0, ConformalQuantile{0.0, 0.2, 10});
  EXPECT_EQ(iv.lower(), 0.0);
  EXPECT_EQ(iv.upper(), 0.0);
  iv = vcp_interval(8.0, vcp_calibrate(std::vector<double>{1, 2}, 0.1));
  EXPECT_FALSE(iv.bounded());
  EXPECT_TRUE(iv.contains(1e300));
}

TEST(VcpInterval, ConstantWidth) {
  Rng rng(4);
  const ConformalQuantile q{1.2345678901, 0.3, 50};
  const double w = vcp_interval(0.0, q).width();
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(vcp_interval(rng.uniform(-1e3, 1e3), q).width(), w);
}

TEST(VcpCalibrate, MarginalCoverageOnExchangeableDraws) {
  // Exact coverage of the rank rule is r / (n + 1) = 0.7 for n = 99.
  Rng rng(17);
  const std::size_t n = 99;
  const int trials = 2000;
  double covered = 0.0;
  int below = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> res(n);
    for (auto& r : res) r = std::abs(rng.normal());
    const auto q = vcp_calibrate(res, 0.3);
    int hit = 0;
    for (int i = 0; i < 200; ++i) hit += std::abs(rng.normal()) <= q.q_hat ? 1 : 0;
    covered += hit / 200.0;
    below += hit / 200.0 < 0.7 ? 1 : 0;
  }
  EXPECT_NEAR(covered / trials, 0.70, 0.01);
  EXPECT_GT(below, 0);
}

}  // namespace
}  // namespace pacvi
