#include "cordet/perms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace cordet {

namespace {

void check_rho_below_one(double rho, const char* where) {
  if (!std::isfinite(rho) || rho * rho >= 1.0) {
    throw DivergenceError(std::string(where) + ": requires |rho| < 1 (rho^2 = 1 diverges)");
  }
}

void check_cycle_n(std::size_t n, const char* where) {
  if (n == 0 || n > kMaxCycleTypeN) {
    throw std::invalid_argument(std::string(where) + ": n must lie in [1, 128]");
  }
}

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double log_sum_exp(const std::vector<double>& terms) {
  const double top = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(top)) {
    return top;
  }
  CompensatedSum acc;
  for (double t : terms) {
    acc.add(std::exp(t - top));
  }
  return top + std::log(acc.value());
}

void partitions(std::size_t remaining, std::size_t max_part, CycleType& type,
                const std::function<void(const CycleType&)>& visit) {
  if (remaining == 0) {
    visit(type);
    return;
  }
  for (std::size_t part = std::min(remaining, max_part); part >= 1; --part) {
    ++type.counts[part - 1];
    partitions(remaining - part, part, type, visit);
    --type.counts[part - 1];
  }
}

}  // namespace

CycleWeights::CycleWeights(std::size_t n, std::size_t d, double rho) : log_w_(n) {
  check_rho_below_one(rho, "CycleWeights");
  const double rho_sq = rho * rho;
  const double dd = static_cast<double>(d);
  for (std::size_t k = 1; k <= n; ++k) {
    const double power = std::pow(rho_sq, static_cast<double>(k));
    log_w_[k - 1] = -dd * std::log1p(-power);
  }
}

double CycleWeights::weight(std::size_t k) const { return std::exp(log_weight(k)); }

double CycleWeights::log_product(const CycleType& type) const {
  double total = 0.0;
  for (std::size_t k = 1; k <= type.n(); ++k) {
    if (const std::size_t count = type.count(k); count != 0) {
      total += static_cast<double>(count) * log_weight(k);
    }
  }
  return total;
}

BigInt permutations_with_type(const CycleType& type) {
  if (type.weight() != type.n()) {
    throw std::invalid_argument("permutations_with_type: sum k N_k != n");
  }
  BigInt numerator = 1;
  for (std::size_t i = 2; i <= type.n(); ++i) {
    numerator *= i;
  }
  BigInt denominator = 1;
  for (std::size_t k = 1; k <= type.n(); ++k) {
    for (std::size_t j = 1; j <= type.count(k); ++j) {
      denominator *= k;
      denominator *= j;
    }
  }
  return numerator / denominator;
}

double log_type_probability(const CycleType& type) {
  double total = 0.0;
  for (std::size_t k = 1; k <= type.n(); ++k) {
    if (const std::size_t count = type.count(k); count != 0) {
      const double c = static_cast<double>(count);
      total -= c * std::log(static_cast<double>(k)) + std::lgamma(c + 1.0);
    }
  }
  return total;
}

void for_each_cycle_type(std::size_t n, const std::function<void(const CycleType&)>& visit) {
  check_cycle_n(n, "for_each_cycle_type");
  CycleType type{std::vector<std::size_t>(n, 0)};
  partitions(n, n, type, visit);
}

std::vector<CycleTypeCount> enumerate_cycle_types(std::size_t n) {
  if (n == 0 || n > kMaxMaterializedN) {
    throw std::invalid_argument("enumerate_cycle_types: n must lie in [1, 64]; use "
                                "for_each_cycle_type for larger n");
  }
  std::vector<CycleTypeCount> out;
  for_each_cycle_type(n, [&](const CycleType& type) {
    out.push_back({type, permutations_with_type(type)});
  });
  return out;
}

double second_moment_exact(const ModelParams& params) {
  const std::size_t n = params.n();
  check_cycle_n(n, "second_moment_exact");
  if (n > kMaxMaterializedN) {
    return second_moment_recurrence(params);
  }
  const CycleWeights weights(n, params.d(), params.rho());
  std::vector<double> log_terms;
  for_each_cycle_type(n, [&](const CycleType& type) {
    log_terms.push_back(log_type_probability(type) + weights.log_product(type));
  });
  // Every w_k >= 1, so the exact value is >= 1; clamp away rounding below it.
  return std::max(1.0, std::exp(log_sum_exp(log_terms)));
}

double second_moment_recurrence(const ModelParams& params) {
  const std::size_t n = params.n();
  const CycleWeights weights(n, params.d(), params.rho());
  std::vector<double> log_a(n + 1, 0.0);
  std::vector<double> terms;
  terms.reserve(n);
  for (std::size_t m = 1; m <= n; ++m) {
    terms.clear();
    for (std::size_t k = 1; k <= m; ++k) {
      terms.push_back(weights.log_weight(k) + log_a[m - k]);
    }
    log_a[m] = log_sum_exp(terms) - std::log(static_cast<double>(m));
  }
  return std::max(1.0, std::exp(log_a[n]));
}

double second_moment_bruteforce(const ModelParams& params) {
  const std::size_t n = params.n();
  if (n > kMaxBruteForceN) {
    throw std::invalid_argument("second_moment_bruteforce: n must be <= 8");
  }
  check_rho_below_one(params.rho(), "second_moment_bruteforce");
  // Direct powers, deliberately not the log1p route used above.
  std::vector<double> w(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) {
    w[k] = std::pow(1.0 - std::pow(params.rho_sq(), static_cast<double>(k)),
                    -static_cast<double>(params.d()));
  }
  std::vector<std::size_t> map(n);
  std::iota(map.begin(), map.end(), std::size_t{0});
  std::vector<bool> visited(n);
  double total = 0.0;
  double perms = 0.0;
  do {
    std::fill(visited.begin(), visited.end(), false);
    double product = 1.0;
    for (std::size_t s = 0; s < n; ++s) {
      std::size_t length = 0;
      for (std::size_t i = s; !visited[i]; i = map[i]) {
        visited[i] = true;
        ++length;
      }
      if (length != 0) {
        product *= w[length];
      }
    }
    total += product;
    perms += 1.0;
  } while (std::next_permutation(map.begin(), map.end()));
  return total / perms;
}

MeanEstimate second_moment_mc(const ModelParams& params, std::size_t trials, const RngStream& rng,
                              unsigned threads) {
  const CycleWeights weights(params.n(), params.d(), params.rho());
  return monte_carlo_mean(trials, rng, threads, [&](Philox4x32& engine) {
    const auto sigma = Permutation::uniform(params.n(), engine);
    return std::exp(weights.log_product(cycle_type(sigma)));
  });
}

MeanEstimate cycle_factor_mc(std::size_t k, std::size_t d, double rho, std::size_t trials,
                             const RngStream& rng, unsigned threads) {
  if (k == 0 || d == 0) {
    throw std::invalid_argument("cycle_factor_mc: k and d must be positive");
  }
  check_rho_below_one(rho, "cycle_factor_mc");
  const double one_minus = (1.0 - rho) * (1.0 + rho);
  const double log_norm = -0.5 * std::log1p(-rho * rho);
  // log N_rho(x,y)/N_0(x,y) for one coordinate pair.
  auto log_ratio = [&](double x, double y) {
    const double q0 = x * x + y * y;
    const double q_rho = q0 - 2.0 * rho * x * y;
    return log_norm - q_rho / (2.0 * one_minus) + q0 / 2.0;
  };

  return monte_carlo_mean(trials, rng, threads, [&](Philox4x32& engine) {
    std::normal_distribution<double> normal;
    RowMatrix<double> x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    RowMatrix<double> y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x.data()[i] = normal(engine);
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      y.data()[i] = normal(engine);
    }
    double log_z = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const auto next = static_cast<Eigen::Index>((i + 1) % k);
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        log_z += log_ratio(x(row, c), y(next, c)) + log_ratio(x(row, c), y(row, c));
      }
    }
    return std::exp(log_z);
  });
}

double cycle_factor_exact(std::size_t k, std::size_t d, double rho) {
  return CycleWeights(k, d, rho).weight(k);
}

double log_poisson_product(std::size_t m, std::size_t d, double rho) {
  if (m == 0) {
    throw std::invalid_argument("log_poisson_product: m must be >= 1");
  }
  const CycleWeights weights(m, d, rho);
  CompensatedSum acc;
  for (std::size_t k = 1; k <= m; ++k) {
    acc.add(std::expm1(weights.log_weight(k)) / static_cast<double>(k));
  }
  return acc.value();
}

double poisson_product_closed_form(std::size_t m, std::size_t d, double rho) {
  return std::exp(log_poisson_product(m, d, rho));
}

MeanEstimate poisson_product_mc(std::size_t m, std::size_t d, double rho, std::size_t trials,
                                const RngStream& rng, unsigned threads) {
  if (m == 0) {
    throw std::invalid_argument("poisson_product_mc: m must be >= 1");
  }
  const CycleWeights weights(m, d, rho);
  return monte_carlo_mean(trials, rng, threads, [&](Philox4x32& engine) {
    double log_value = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
      std::poisson_distribution<long> poisson(1.0 / static_cast<double>(k));
      log_value += static_cast<double>(poisson(engine)) * weights.log_weight(k);
    }
    return std::exp(log_value);
  });
}

}  // namespace cordet
