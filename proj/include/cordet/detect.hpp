#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "cordet/assignment.hpp"
#include "cordet/model.hpp"

namespace cordet {

/// Outcome of one test on one database pair.
struct TestDecision {
  bool decision = false;  // true = declare H1
  double statistic = 0.0;
  double threshold = 0.0;
};

enum class PSource { monte_carlo, quarter_bound };

/// Threshold input for the count test: the probability P_{d,rho} that a
/// correlated pair's normalized overlap clears |rho|.
struct CountTestConfig {
  double p_d_rho = 0.25;
  PSource source = PSource::quarter_bound;
  std::size_t samples = 0;  // Monte Carlo source only
  std::uint64_t seed = 0;   // Monte Carlo source only

  static constexpr std::size_t kDefaultSamples = 100000;
  static constexpr std::uint64_t kDefaultSeed = 0x5EED'C0DE'0000'0001ull;

  /// Universal lower bound P_{d,rho} >= 1/4 (threshold n/8).
  static CountTestConfig quarter_bound();

  /// Monte Carlo estimate with a pinned seed, cached per (d, rho, samples,
  /// seed). The cache is process-wide and insert-once.
  static CountTestConfig monte_carlo(std::size_t d, double rho,
                                     std::size_t samples = kDefaultSamples,
                                     std::uint64_t seed = kDefaultSeed);
};

/// Number of entries currently held by the P_{d,rho} cache.
std::size_t p_cache_size();

namespace detail {

template <typename Scalar>
void check_db(const DatabasePair<Scalar>& db, const ModelParams& params, const char* where) {
  check_shape(db, where);
  if (static_cast<std::size_t>(db.rows()) != params.n() ||
      static_cast<std::size_t>(db.cols()) != params.d()) {
    throw std::invalid_argument(std::string(where) + ": database shape does not match params");
  }
}

inline double sum_threshold(const ModelParams& params) {
  return params.abs_rho() * static_cast<double>(params.d()) * static_cast<double>(params.n()) /
         2.0;
}

}  // namespace detail

/// Global-sum test: sign(rho) * sum_{i,j} X_i^T Y_j > |rho| d n / 2.
/// The double sum is evaluated as (sum_i X_i)^T (sum_j Y_j).
template <typename Scalar>
TestDecision phi_sum(const DatabasePair<Scalar>& db, const ModelParams& params) {
  detail::check_db(db, params, "phi_sum");
  const Eigen::RowVectorXd sx = db.x.template cast<double>().colwise().sum();
  const Eigen::RowVectorXd sy = db.y.template cast<double>().colwise().sum();
  TestDecision out;
  out.statistic = params.sign() * sx.dot(sy);
  out.threshold = detail::sum_threshold(params);
  out.decision = out.statistic > out.threshold;
  return out;
}

/// Number of ordered pairs (i, j) with sign(rho) Xbar_i^T Ybar_j >= |rho|.
template <typename Scalar>
std::size_t count_overlaps(const DatabasePair<Scalar>& db, const ModelParams& params) {
  detail::check_db(db, params, "phi_count");
  const RowMatrix<double> xn = normalized_rows(db.x.template cast<double>());
  RowMatrix<double> yn = normalized_rows(db.y.template cast<double>());
  if (params.rho() < 0) {
    yn = -yn;
  }
  const double cut = params.abs_rho();
  constexpr Eigen::Index kBlock = 256;
  std::size_t count = 0;
  Eigen::MatrixXd block;
  for (Eigen::Index start = 0; start < xn.rows(); start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, xn.rows() - start);
    block.noalias() = xn.middleRows(start, rows) * yn.transpose();
    count += static_cast<std::size_t>((block.array() >= cut).count());
  }
  return count;
}

/// Pairwise-overlap count test: count >= n P_{d,rho} / 2.
template <typename Scalar>
TestDecision phi_count(const DatabasePair<Scalar>& db, const ModelParams& params,
                       const CountTestConfig& cfg) {
  TestDecision out;
  out.statistic = static_cast<double>(count_overlaps(db, params));
  out.threshold = 0.5 * static_cast<double>(params.n()) * cfg.p_d_rho;
  out.decision = out.statistic >= out.threshold;
  return out;
}

/// Maximum-likelihood matching: argmax_sigma sign(rho) sum_i X_i^T Y_{sigma(i)}.
template <typename Scalar>
AssignmentResult ml_matching(const DatabasePair<Scalar>& db, const ModelParams& params) {
  detail::check_db(db, params, "phi_max");
  const Eigen::MatrixXd score =
      params.sign() * (db.x.template cast<double>() * db.y.template cast<double>().transpose());
  return solve_assignment(score);
}

/// Matched-sum test: the ML-matched sum against the global-sum threshold.
template <typename Scalar>
TestDecision phi_max(const DatabasePair<Scalar>& db, const ModelParams& params) {
  const AssignmentResult match = ml_matching(db, params);
  TestDecision out;
  out.statistic = match.value;
  out.threshold = detail::sum_threshold(params);
  out.decision = out.statistic > out.threshold;
  return out;
}

enum class TestKind { sum, count, max };

std::string_view to_string(TestKind kind) noexcept;
/// Accepts "sum", "count", "max"; throws std::invalid_argument otherwise.
TestKind parse_test_kind(std::string_view name);

/// A test identifier plus its configuration.
struct DetectionTest {
  TestKind kind = TestKind::sum;
  CountTestConfig count{};  // used by TestKind::count only
};

template <typename Scalar>
TestDecision apply_test(const DetectionTest& test, const DatabasePair<Scalar>& db,
                        const ModelParams& params) {
  switch (test.kind) {
    case TestKind::sum:
      return phi_sum(db, params);
    case TestKind::count:
      return phi_count(db, params, test.count);
    case TestKind::max:
      return phi_max(db, params);
  }
  throw std::invalid_argument("apply_test: unknown test kind");
}

}  // namespace cordet
