#include "pacvi/pac_interval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "pacvi/errors.hpp"
#include "pacvi/exact_binomial.hpp"
#include "pacvi/record_io.hpp"
#include "pacvi/rng.hpp"

namespace pacvi {
namespace {

// Records whose normalized scores are exactly `scores` (mu = 0, sigma = 1).
std::vector<CalibrationRecord> records_with_scores(const std::vector<double>& scores) {
  std::vector<CalibrationRecord> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.push_back({{0.0, 1.0}, i % 2 == 0 ? scores[i] : -scores[i]});
  }
  return out;
}

std::vector<CalibrationRecord> random_records(Rng& rng, std::size_t n) {
  std::vector<CalibrationRecord> out(n);
  for (auto& r : out) {
    r.prediction = {rng.uniform(0, 10), rng.uniform(0.1, 2.0)};
    r.y = r.prediction.mu + r.prediction.sigma * rng.normal();
  }
  return out;
}

TEST(NormalizedScore, Examples) {
  EXPECT_EQ(normalized_score({{5.0, 1.0}, 5.0}), 0.0);
  EXPECT_EQ(normalized_score({{5.0, 2.0}, 9.0}), 2.0);
  EXPECT_EQ(normalized_score({{3.0, 0.5}, 2.0}), 2.0);
  EXPECT_THROW(normalized_score({{3.0, 0.0}, 2.0}), InvalidArgument);
  EXPECT_THROW(normalized_score({{3.0, -1.0}, 2.0}), InvalidArgument);
}

TEST(PacTarget, Validates) {
  EXPECT_THROW(PacTarget(0.0, 0.1), InvalidArgument);
  EXPECT_THROW(PacTarget(1.0, 0.1), InvalidArgument);
  EXPECT_THROW(PacTarget(0.1, 0.0), InvalidArgument);
  EXPECT_THROW(PacTarget(0.1, 1.0), InvalidArgument);
}

TEST(Calibrate, SmallExample) {
  const auto res = calibrate(records_with_scores({1.5, 0.5, 2.0, 1.0}), PacTarget(0.2, 0.5));
  ASSERT_TRUE(res.feasible);
  EXPECT_EQ(res.k_required, 4u);
  EXPECT_EQ(*res.c_star, 2.0);
  EXPECT_EQ(res.n, 4u);
  EXPECT_LT(cp_lower_bound(3, 4, 0.5), 0.8);
  EXPECT_NEAR(cp_lower_bound(4, 4, 0.5), 0.8408964152537145, 1e-12);
}

TEST(Calibrate, InfeasibleIsReportedNotThrown) {
  const auto res = calibrate(records_with_scores({0.1, 0.2, 0.3, 0.4}), PacTarget(0.05, 0.001));
  EXPECT_FALSE(res.feasible);
  EXPECT_FALSE(res.c_star.has_value());
  EXPECT_EQ(res.k_required, 0u);
  EXPECT_LT(cp_lower_bound(4, 4, 0.001), 0.95);
}

TEST(Calibrate, TiesCollapse) {
  const auto res = calibrate(records_with_scores(std::vector<double>(100, 1.0)), PacTarget(0.3, 0.05));
  ASSERT_TRUE(res.feasible);
  EXPECT_EQ(*res.c_star, 1.0);
  EXPECT_NEAR(cp_lower_bound(100, 100, 0.05), 0.9704869503929601, 1e-12);
}

TEST(Calibrate, EmptyThrows) {
  EXPECT_THROW(calibrate(std::vector<CalibrationRecord>{}, PacTarget(0.1, 0.1)), EmptyInput);
}

TEST(Calibrate, MatchesBruteForce) {
  Rng rng(99);
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = 1 + rng.index(12);
    std::vector<double> scores(n);
    // Coarse grid so ties are common.
    for (auto& s : scores) s = 0.25 * static_cast<double>(rng.index(12));
    const double eps = rng.uniform(0.05, 0.6);
    const double delta = rng.uniform(0.01, 0.5);
    const auto got = calibrate(records_with_scores(scores), PacTarget(eps, delta));
    const auto want = oracle::brute_force_c_star(scores, eps, delta);
    ASSERT_EQ(got.feasible, want.has_value()) << "inst " << inst;
    if (want) EXPECT_EQ(*got.c_star, *want) << "inst " << inst;
  }
}

TEST(Calibrate, CertificateAndMonotonicity) {
  Rng rng(1234);
  for (int inst = 0; inst < 40; ++inst) {
    const auto recs = random_records(rng, 50 + rng.index(400));
    const auto a = calibrate(recs, PacTarget(0.1, 0.05));
    const auto b = calibrate(recs, PacTarget(0.3, 0.05));
    const auto c = calibrate(recs, PacTarget(0.1, 0.001));
    if (a.feasible && b.feasible) EXPECT_GE(*a.c_star, *b.c_star);
    if (a.feasible && c.feasible) EXPECT_GE(*c.c_star, *a.c_star);
    for (const auto* r : {&a, &b, &c}) {
      if (!r->feasible) continue;
      std::size_t covered = 0;
      for (const auto& rec : recs) {
        covered += build_interval(rec.prediction, *r->c_star).contains(rec.y) ? 1 : 0;
      }
      EXPECT_GE(covered, r->k_required);
      EXPECT_GE(cp_lower_bound(static_cast<std::int64_t>(r->k_required),
                               static_cast<std::int64_t>(recs.size()), r->target.delta()),
                1.0 - r->target.epsilon());
    }
  }
}

TEST(Calibrate, PermutationInvariantAndScaleEquivariant) {
  Rng rng(77);
  for (int inst = 0; inst < 20; ++inst) {
    auto recs = random_records(rng, 200);
    const PacTarget target(0.2, 0.01);
    const auto base = calibrate(recs, target);
    rng.shuffle(std::span<CalibrationRecord>(recs));
    const auto shuffled = calibrate(recs, target);
    EXPECT_EQ(base.c_star, shuffled.c_star);
    EXPECT_EQ(base.k_required, shuffled.k_required);

    // Powers of two keep the scores bit-identical.
    const double lambda = 4.0;
    auto scaled = recs;
    for (auto& r : scaled) {
      r.prediction.mu *= lambda;
      r.prediction.sigma *= lambda;
      r.y *= lambda;
    }
    const auto s = calibrate(scaled, target);
    EXPECT_EQ(s.feasible, base.feasible);
    EXPECT_EQ(s.c_star, base.c_star);
    const auto iv = build_interval(recs[0].prediction, *base.c_star);
    const auto is = build_interval(scaled[0].prediction, *s.c_star);
    EXPECT_DOUBLE_EQ(is.lower(), lambda * iv.lower());
    EXPECT_DOUBLE_EQ(is.upper(), lambda * iv.upper());

    // A non-dyadic factor moves scores by rounding only.
    auto scaled3 = recs;
    for (auto& r : scaled3) {
      r.prediction.mu *= 3.7;
      r.prediction.sigma *= 3.7;
      r.y *= 3.7;
    }
    const auto s3 = calibrate(scaled3, target);
    EXPECT_NEAR(*s3.c_star, *base.c_star, 1e-12);
  }
}

TEST(BuildInterval, Examples) {
  auto iv = build_interval({5.0, 1.0}, 2.0);
  EXPECT_EQ(iv.lower(), 3.0);
  EXPECT_EQ(iv.upper(), 7.0);
  iv = build_interval({5.0, 1.0}, 0.0);
  EXPECT_EQ(iv.lower(), 5.0);
  EXPECT_EQ(iv.upper(), 5.0);
  EXPECT_EQ(iv.width(), 0.0);
  iv = build_interval({7.2, 1.5}, 1.0364);
  EXPECT_NEAR(iv.lower(), 5.6454, 1e-12);
  EXPECT_NEAR(iv.upper(), 8.7546, 1e-12);
  EXPECT_NEAR(iv.width(), 3.1092, 1e-12);
  EXPECT_THROW(build_interval({5.0, 1.0}, -0.1), InvalidArgument);
  EXPECT_THROW(build_interval({5.0, 0.0}, 1.0), InvalidArgument);
}

TEST(BuildInterval, WidthAndCoverageDuality) {
  Rng rng(31);
  for (int t = 0; t < 2000; ++t) {
    const CalibrationRecord rec{{rng.uniform(-5, 15), rng.uniform(0.01, 3.0)}, rng.uniform(-5, 15)};
    const double c = rng.uniform(0.0, 5.0);
    const auto iv = build_interval(rec.prediction, c);
    EXPECT_EQ(iv.width(), 2.0 * c * rec.prediction.sigma);
    EXPECT_NEAR(iv.upper() - iv.lower(), iv.width(), 1e-12);
    EXPECT_TRUE(iv.contains(rec.prediction.mu));
    EXPECT_EQ(iv.contains(rec.y), normalized_score(rec) <= c);
  }
  // Exactly on the endpoint counts as covered.
  const CalibrationRecord edge{{5.0, 2.0}, 9.0};
  EXPECT_TRUE(build_interval(edge.prediction, normalized_score(edge)).contains(edge.y));
}

TEST(ClipInterval, ReportingOnly) {
  const auto iv = clip_interval(build_interval({9.0, 1.0}, 2.0), 0.0, 10.0);
  EXPECT_EQ(iv.lower(), 7.0);
  EXPECT_EQ(iv.upper(), 10.0);
  EXPECT_EQ(iv.width(), 3.0);
}

TEST(RecordIo, CsvAndJson) {
  std::istringstream in("mu,sigma,y\n5,1,5\n5,2,9\n\n3,0.5,2\n");
  const auto recs = read_calibration_csv(in);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(normalized_score(recs[1]), 2.0);

  std::ostringstream out;
  write_calibration_csv(out, recs);
  std::istringstream again(out.str());
  EXPECT_EQ(read_calibration_csv(again).size(), 3u);

  const auto res = calibrate(recs, PacTarget(0.4, 0.4));
  const auto j = to_json(res);
  for (const char* key : {"c_star", "epsilon", "delta", "n", "k_required", "feasible"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["n"], 3);
  const auto infeasible = to_json(calibrate(recs, PacTarget(0.01, 0.01)));
  EXPECT_TRUE(infeasible["c_star"].is_null());
  EXPECT_EQ(infeasible["feasible"], false);

  std::istringstream bad_header("mu,y,sigma\n1,2,3\n");
  EXPECT_THROW(read_calibration_csv(bad_header), InvalidArgument);
  std::istringstream bad_sigma("mu,sigma,y\n1,0,3\n");
  EXPECT_THROW(read_calibration_csv(bad_sigma), InvalidArgument);
  std::istringstream bad_fields("mu,sigma,y\n1,2\n");
  EXPECT_THROW(read_calibration_csv(bad_fields), InvalidArgument);
  std::istringstream bad_number("mu,sigma,y\n1,abc,3\n");
  EXPECT_THROW(read_calibration_csv(bad_number), InvalidArgument);
}

}  // namespace
}  // namespace pacvi
