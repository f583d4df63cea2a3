#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <functional>
#include <vector>

#include "cordet/model.hpp"
#include "cordet/montecarlo.hpp"
#include "cordet/permutation.hpp"
#include "cordet/rng.hpp"

namespace cordet {

using BigInt = boost::multiprecision::cpp_int;

/// Largest n accepted by the cycle-type machinery.
inline constexpr std::size_t kMaxCycleTypeN = 128;
/// Largest n for which `enumerate_cycle_types` materializes its table
/// (p(64) = 1 741 630 types).
inline constexpr std::size_t kMaxMaterializedN = 64;
/// Largest n accepted by the n! brute-force oracle.
inline constexpr std::size_t kMaxBruteForceN = 8;

/// Per-cycle-length weights w_k = (1 - rho^{2k})^{-d}, stored as logs.
class CycleWeights {
 public:
  /// Throws DivergenceError when rho^2 >= 1.
  CycleWeights(std::size_t n, std::size_t d, double rho);

  [[nodiscard]] std::size_t size() const noexcept { return log_w_.size(); }
  /// log w_k = -d log(1 - rho^{2k}), 1 <= k <= n.
  [[nodiscard]] double log_weight(std::size_t k) const { return log_w_.at(k - 1); }
  [[nodiscard]] double weight(std::size_t k) const;
  /// sum_k N_k log w_k.
  [[nodiscard]] double log_product(const CycleType& type) const;

 private:
  std::vector<double> log_w_;
};

struct CycleTypeCount {
  CycleType type;
  BigInt count;  // n! / prod_k (k^{N_k} N_k!)
};

/// Number of permutations in S_n with the given cycle type.
BigInt permutations_with_type(const CycleType& type);

/// log(count / n!) = -sum_k (N_k log k + log N_k!).
double log_type_probability(const CycleType& type);

/// Calls `visit` once per integer partition of n (as a cycle type), in
/// reverse-lexicographic order of parts. Requires 1 <= n <= 128.
void for_each_cycle_type(std::size_t n, const std::function<void(const CycleType&)>& visit);

/// Every cycle type of S_n with its exact permutation count.
/// Requires 1 <= n <= kMaxMaterializedN.
std::vector<CycleTypeCount> enumerate_cycle_types(std::size_t n);

/// E_0[L^2] = E_pi[prod_k w_k^{N_k}] summed over cycle types, in log space
/// with compensated summation. Uses the cycle-index recurrence when the
/// partition table is too large to walk (n > kMaxMaterializedN).
double second_moment_exact(const ModelParams& params);

/// Same expectation via a_m = (1/m) sum_{k<=m} w_k a_{m-k}, a_0 = 1.
double second_moment_recurrence(const ModelParams& params);

/// Average of prod_k w_k^{N_k} over all n! permutations; n <= 8.
double second_moment_bruteforce(const ModelParams& params);

/// Monte Carlo over uniform permutations.
MeanEstimate second_moment_mc(const ModelParams& params, std::size_t trials, const RngStream& rng,
                              unsigned threads = 0);

/// Monte Carlo estimate of E_0[Z_C] for the k-cycle (1 2 ... k) under H0,
/// with every density ratio evaluated in log space.
MeanEstimate cycle_factor_mc(std::size_t k, std::size_t d, double rho, std::size_t trials,
                             const RngStream& rng, unsigned threads = 0);

/// Exact cycle factor (1 - rho^{2k})^{-d}.
double cycle_factor_exact(std::size_t k, std::size_t d, double rho);

/// log E[prod_{k<=m} w_k^{Z_k}] for independent Z_k ~ Poisson(1/k):
/// sum_k (w_k - 1)/k.
double log_poisson_product(std::size_t m, std::size_t d, double rho);
double poisson_product_closed_form(std::size_t m, std::size_t d, double rho);

/// Monte Carlo of the same expectation by sampling the Poisson variables.
MeanEstimate poisson_product_mc(std::size_t m, std::size_t d, double rho, std::size_t trials,
                                const RngStream& rng, unsigned threads = 0);

}  // namespace cordet
