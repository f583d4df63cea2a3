#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "cordet/error.hpp"
#include "cordet/permutation.hpp"
#include "cordet/rng.hpp"

namespace cordet {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Problem instance: n users, d features, correlation rho in [-1,1] \ {0}.
class ModelParams {
 public:
  ModelParams(std::size_t n, std::size_t d, double rho);

  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t d() const noexcept { return d_; }
  [[nodiscard]] double rho() const noexcept { return rho_; }
  [[nodiscard]] double rho_sq() const noexcept { return rho_ * rho_; }
  [[nodiscard]] double abs_rho() const noexcept { return std::abs(rho_); }
  /// +1 or -1.
  [[nodiscard]] double sign() const noexcept { return rho_ < 0 ? -1.0 : 1.0; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::size_t n_;
  std::size_t d_;
  double rho_;
};

/// The two n x d databases; row i of each matrix is user i.
template <typename Scalar = double>
struct DatabasePair {
  RowMatrix<Scalar> x;
  RowMatrix<Scalar> y;

  [[nodiscard]] Eigen::Index rows() const noexcept { return x.rows(); }
  [[nodiscard]] Eigen::Index cols() const noexcept { return x.cols(); }
};

namespace detail {

template <typename Scalar, typename Engine>
void fill_standard_normal(RowMatrix<Scalar>& m, Engine& engine) {
  std::normal_distribution<Scalar> normal;
  Scalar* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    data[i] = normal(engine);
  }
}

template <typename Scalar>
void check_shape(const DatabasePair<Scalar>& db, const char* where) {
  if (db.x.rows() != db.y.rows() || db.x.cols() != db.y.cols()) {
    throw std::invalid_argument(std::string(where) + ": X and Y shapes differ");
  }
}

}  // namespace detail

/// H0: X and Y with i.i.d. N(0,1) entries, X drawn first.
template <typename Scalar = double>
DatabasePair<Scalar> sample_null(const ModelParams& params, const RngStream& rng) {
  auto engine = rng.engine();
  const auto n = static_cast<Eigen::Index>(params.n());
  const auto d = static_cast<Eigen::Index>(params.d());
  DatabasePair<Scalar> db{RowMatrix<Scalar>(n, d), RowMatrix<Scalar>(n, d)};
  detail::fill_standard_normal(db.x, engine);
  detail::fill_standard_normal(db.y, engine);
  return db;
}

namespace detail {

template <typename Scalar, typename Engine>
DatabasePair<Scalar> sample_alt_with(const ModelParams& params, const Permutation& sigma,
                                     Engine& engine) {
  if (sigma.size() != params.n()) {
    throw std::invalid_argument("sample_alt: permutation size " + std::to_string(sigma.size()) +
                                " does not match n = " + std::to_string(params.n()));
  }
  const auto n = static_cast<Eigen::Index>(params.n());
  const auto d = static_cast<Eigen::Index>(params.d());
  DatabasePair<Scalar> db{RowMatrix<Scalar>(n, d), RowMatrix<Scalar>(n, d)};
  RowMatrix<Scalar> z(n, d);
  fill_standard_normal(db.x, engine);
  fill_standard_normal(z, engine);

  const auto rho = static_cast<Scalar>(params.rho());
  const auto noise = static_cast<Scalar>(std::sqrt((1.0 - params.rho()) * (1.0 + params.rho())));
  for (Eigen::Index i = 0; i < n; ++i) {
    db.y.row(static_cast<Eigen::Index>(sigma[static_cast<std::size_t>(i)])) =
        rho * db.x.row(i) + noise * z.row(i);
  }
  return db;
}

}  // namespace detail

/// H1 with planted permutation sigma: Y_{sigma(i)} = rho X_i + sqrt(1-rho^2) Z_i.
///
/// X and Z are drawn in a fixed order independent of sigma, so two calls
/// with the same stream and different sigma differ only by a row permutation
/// of Y.
template <typename Scalar = double>
DatabasePair<Scalar> sample_alt(const ModelParams& params, const Permutation& sigma,
                                const RngStream& rng) {
  auto engine = rng.engine();
  return detail::sample_alt_with<Scalar>(params, sigma, engine);
}

/// H1 with sigma drawn uniformly from S_n (Fisher-Yates first, then data).
template <typename Scalar = double>
std::pair<DatabasePair<Scalar>, Permutation> sample_alt_uniform(const ModelParams& params,
                                                                const RngStream& rng) {
  auto engine = rng.engine();
  auto sigma = Permutation::uniform(params.n(), engine);
  auto db = detail::sample_alt_with<Scalar>(params, sigma, engine);
  return {std::move(db), std::move(sigma)};
}

/// Rows scaled to unit Euclidean norm. Throws DegenerateInputError for a
/// row whose norm is below 1e-300.
template <typename Derived>
RowMatrix<typename Derived::Scalar> normalized_rows(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  RowMatrix<Scalar> out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Scalar norm = out.row(i).norm();
    if (!(norm >= Scalar(1e-300))) {
      throw DegenerateInputError("normalize_rows: row " + std::to_string(i) +
                                 " has (near-)zero norm");
    }
    out.row(i) /= norm;
  }
  return out;
}

template <typename Scalar>
DatabasePair<Scalar> normalize_rows(const DatabasePair<Scalar>& db) {
  detail::check_shape(db, "normalize_rows");
  return {normalized_rows(db.x), normalized_rows(db.y)};
}

/// Y^tau: row i of the result is row tau(i) of `m`.
template <typename Derived>
RowMatrix<typename Derived::Scalar> permute_rows(const Eigen::MatrixBase<Derived>& m,
                                                 const Permutation& tau) {
  if (static_cast<Eigen::Index>(tau.size()) != m.rows()) {
    throw std::invalid_argument("permute_rows: permutation size does not match row count");
  }
  RowMatrix<typename Derived::Scalar> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.row(i) = m.row(static_cast<Eigen::Index>(tau[static_cast<std::size_t>(i)]));
  }
  return out;
}

// Binary dump: "CDB1", u32 n, u32 d, f64 rho, then X and Y row-major as
// f64, all little-endian.

struct StoredDatabase {
  ModelParams params;
  DatabasePair<double> data;
};

void write_database(std::ostream& out, const ModelParams& params, const DatabasePair<double>& db);
void write_database(const std::string& path, const ModelParams& params,
                    const DatabasePair<double>& db);
StoredDatabase read_database(std::istream& in);
StoredDatabase read_database(const std::string& path);

}  // namespace cordet
