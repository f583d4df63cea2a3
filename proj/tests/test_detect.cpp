#include <gtest/gtest.h>

#include "cordet/detect.hpp"
#include "cordet/harness.hpp"

namespace cordet {
namespace {

DatabasePair<double> ones(std::size_t n, std::size_t d, double y_sign) {
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(d);
  return {RowMatrix<double>::Ones(rows, cols), y_sign * RowMatrix<double>::Ones(rows, cols)};
}

TEST(PhiSum, AllOnes) {
  for (std::size_t n : {1, 3, 8}) {
    const ModelParams p(n, 4, 0.5);
    const auto up = phi_sum(ones(n, 4, 1.0), p);
    EXPECT_TRUE(up.decision);
    EXPECT_DOUBLE_EQ(up.statistic, static_cast<double>(n * n * 4));
    EXPECT_DOUBLE_EQ(up.threshold, 0.25 * static_cast<double>(n * 4));
    EXPECT_FALSE(phi_sum(ones(n, 4, -1.0), p).decision);
  }
}

TEST(PhiSum, FactoredFormEqualsDoubleSum) {
  const ModelParams p(9, 6, 0.3);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto db = sample_null(p, RngStream{s, 5});
    double direct = 0.0;
    for (Eigen::Index i = 0; i < 9; ++i) {
      for (Eigen::Index j = 0; j < 9; ++j) {
        direct += db.x.row(i).dot(db.y.row(j));
      }
    }
    EXPECT_NEAR(phi_sum(db, p).statistic, direct, 1e-9 * (1.0 + std::abs(direct)));
  }
}

TEST(PhiSum, StrictThreshold) {
  // Statistic exactly equal to |rho| d n / 2 does not reject.
  const ModelParams p(1, 2, 1.0);
  DatabasePair<double> db{RowMatrix<double>::Ones(1, 2), RowMatrix<double>::Constant(1, 2, 0.5)};
  const auto r = phi_sum(db, p);
  EXPECT_EQ(r.statistic, r.threshold);
  EXPECT_FALSE(r.decision);
}

TEST(PhiCount, CopiedRowsReject) {
  const ModelParams p(10, 5, 0.9);
  auto db = sample_null(p, RngStream{1, 1});
  db.y = db.x;
  const auto r = phi_count(db, p, CountTestConfig{.p_d_rho = 1.0});
  EXPECT_GE(r.statistic, 10.0);
  EXPECT_TRUE(r.decision);
}

TEST(PhiCount, OrthogonalRowsAccept) {
  const ModelParams p(3, 6, 0.9);
  DatabasePair<double> db{RowMatrix<double>::Zero(3, 6), RowMatrix<double>::Zero(3, 6)};
  for (Eigen::Index i = 0; i < 3; ++i) {
    db.x(i, i) = 1.0 + static_cast<double>(i);
    db.y(i, i + 3) = 2.0;
  }
  const auto r = phi_count(db, p, CountTestConfig::quarter_bound());
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_FALSE(r.decision);
}

TEST(PhiCount, ThresholdIsInclusive) {
  const ModelParams p(4, 3, 0.5);
  auto db = sample_null(p, RngStream{2, 2});
  const double count = static_cast<double>(count_overlaps(db, p));
  const CountTestConfig cfg{.p_d_rho = 2.0 * count / 4.0};
  const auto r = phi_count(db, p, cfg);
  EXPECT_EQ(r.statistic, r.threshold);
  EXPECT_TRUE(r.decision);
}

TEST(PhiCount, BlockedCountMatchesDirect) {
  const ModelParams p(600, 3, 0.7);  // spans several 256-row blocks
  const auto db = sample_alt(p, Permutation::identity(600), RngStream{3, 3});
  const auto xn = normalized_rows(db.x);
  const auto yn = normalized_rows(db.y);
  std::size_t direct = 0;
  for (Eigen::Index i = 0; i < 600; ++i) {
    for (Eigen::Index j = 0; j < 600; ++j) {
      direct += xn.row(i).dot(yn.row(j)) >= 0.7 ? 1 : 0;
    }
  }
  EXPECT_EQ(count_overlaps(db, p), direct);
}

TEST(PhiMax, CopyRecoversIdentity) {
  const ModelParams p(6, 4, 0.9);
  auto db = sample_null(p, RngStream{4, 4});
  db.y = db.x;
  const auto match = ml_matching(db, p);
  EXPECT_TRUE(match.assignment.is_identity());
  EXPECT_NEAR(phi_max(db, p).statistic, db.x.squaredNorm(), 1e-12);
}

TEST(PhiMax, IdenticalRowsStillGiveValidPermutation) {
  const ModelParams p(5, 3, 0.5);
  DatabasePair<double> db{RowMatrix<double>::Ones(5, 3), RowMatrix<double>::Ones(5, 3)};
  const auto match = ml_matching(db, p);
  EXPECT_EQ(match.assignment.size(), 5u);
  EXPECT_DOUBLE_EQ(match.value, 15.0);
}

TEST(PhiMax, MatchesExhaustiveOnSixUsers) {
  const ModelParams p(6, 3, 0.6);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto db = sample_alt(p, Permutation::identity(6), RngStream{5, s});
    const Eigen::MatrixXd score = db.x * db.y.transpose();
    EXPECT_EQ(ml_matching(db, p).assignment, assignment_bruteforce(score).first);
  }
}

// Relabelling the rows of Y never changes a decision.
TEST(Detect, PermutationInvariance) {
  const ModelParams p(12, 4, 0.6);
  const auto count_cfg = CountTestConfig::monte_carlo(4, 0.6);
  auto engine = RngStream{6, 0}.engine();
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto db = s % 2 ? sample_null(p, RngStream{6, s})
                          : sample_alt(p, Permutation::uniform(12, engine), RngStream{6, s});
    const auto tau = Permutation::uniform(12, engine);
    const DatabasePair<double> moved{db.x, permute_rows(db.y, tau)};
    EXPECT_EQ(phi_sum(db, p).decision, phi_sum(moved, p).decision);
    EXPECT_EQ(count_overlaps(db, p), count_overlaps(moved, p));
    EXPECT_EQ(phi_count(db, p, count_cfg).decision, phi_count(moved, p, count_cfg).decision);
    EXPECT_NEAR(phi_max(db, p).statistic, phi_max(moved, p).statistic, 1e-9);
    EXPECT_EQ(phi_max(db, p).decision, phi_max(moved, p).decision);
  }
}

TEST(Detect, SignCovariance) {
  const ModelParams pos(10, 5, 0.5);
  const ModelParams neg(10, 5, -0.5);
  const auto cfg = CountTestConfig::quarter_bound();
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto db = s % 2 ? sample_null(pos, RngStream{7, s})
                          : sample_alt(pos, Permutation::identity(10), RngStream{7, s});
    const DatabasePair<double> flipped{db.x, -db.y};
    EXPECT_EQ(phi_sum(db, pos).decision, phi_sum(flipped, neg).decision);
    EXPECT_EQ(phi_count(db, pos, cfg).decision, phi_count(flipped, neg, cfg).decision);
    EXPECT_EQ(phi_max(db, pos).decision, phi_max(flipped, neg).decision);
  }
}

TEST(Detect, RejectsShapeMismatch) {
  const ModelParams p(3, 2, 0.5);
  const auto db = sample_null(ModelParams(4, 2, 0.5), RngStream{});
  EXPECT_THROW(phi_sum(db, p), std::invalid_argument);
  EXPECT_THROW(count_overlaps(db, p), std::invalid_argument);
  EXPECT_THROW(phi_max(db, p), std::invalid_argument);
}

TEST(CountConfig, MonteCarloIsCachedAndAboveQuarter) {
  const auto before = p_cache_size();
  const auto a = CountTestConfig::monte_carlo(7, 0.35);
  const auto mid = p_cache_size();
  const auto b = CountTestConfig::monte_carlo(7, 0.35);
  EXPECT_EQ(mid, before + 1);
  EXPECT_EQ(p_cache_size(), mid);
  EXPECT_EQ(a.p_d_rho, b.p_d_rho);
  EXPECT_EQ(a.source, PSource::monte_carlo);
  EXPECT_EQ(a.samples, CountTestConfig::kDefaultSamples);
  EXPECT_GE(a.p_d_rho, 0.25);
  EXPECT_EQ(CountTestConfig::quarter_bound().p_d_rho, 0.25);
}

TEST(TestKind, Parsing) {
  EXPECT_EQ(parse_test_kind("sum"), TestKind::sum);
  EXPECT_EQ(parse_test_kind("count"), TestKind::count);
  EXPECT_EQ(parse_test_kind("max"), TestKind::max);
  EXPECT_THROW(parse_test_kind("phi"), std::invalid_argument);
  EXPECT_EQ(to_string(TestKind::count), "count");
}

}  // namespace
}  // namespace cordet
