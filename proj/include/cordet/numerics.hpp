#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cordet/rng.hpp"

namespace cordet {

enum class OverlapMethod { exact_beta, monte_carlo };

/// Probability that a normalized overlap clears its threshold.
struct OverlapProb {
  double value = 0.0;
  double std_error = 0.0;  // zero for exact evaluations
  OverlapMethod method = OverlapMethod::exact_beta;
  std::size_t samples = 0;
};

/// Regularized incomplete beta I_x(a, b); continued fraction with the
/// usual x < (a+1)/(a+b+2) symmetry split. a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Same, with the complement y = 1 - x supplied by the caller to avoid
/// cancellation when x is close to 1.
double incomplete_beta(double a, double b, double x, double y);

/// Q_{d,rho} = P(Xbar^T Ybar >= rho) for independent uniform directions in
/// R^d. Uses T^2 ~ Beta(1/2, (d-1)/2). Requires d >= 2; returns 0 for
/// rho >= 1 and 1 for rho <= -1.
OverlapProb q_exact(std::size_t d, double rho);

/// True when sign(rho) * x^T y >= |rho| * |x| |y|, evaluated without square
/// roots so that y = +-x with |rho| = 1 compares exactly.
bool overlap_at_least(double dot, double xx, double yy, double rho) noexcept;

/// Monte Carlo P_{d,rho}: frequency of sign(rho) Xbar^T Ybar >= |rho| for a
/// rho-correlated Gaussian pair. rho = 0 is allowed (it gives Q_{d,0}).
OverlapProb p_mc(std::size_t d, double rho, std::size_t samples, const RngStream& rng,
                 unsigned threads = 0);

/// Independent-direction Monte Carlo of Q_{d,rho} at several thresholds,
/// sharing one set of sphere samples. Used to cross-check q_exact.
std::vector<OverlapProb> q_sphere_mc(std::size_t d, std::span<const double> rhos,
                                     std::size_t samples, const RngStream& rng,
                                     unsigned threads = 0);

/// Upper bound on the cap area Vol(B_rho):
/// 2 exp(((d-1)/2) log(2 pi e (1-rho^2)/(d-1))) rho^{1-d}, rho in (0,1).
double log_cap_volume_upper(std::size_t d, double rho);
double cap_volume_upper(std::size_t d, double rho);

struct SphereArea {
  double lower_bound = 0.0;  // (4/d) exp((d/2) log(2 pi / d))
  double exact = 0.0;        // 2 pi^{d/2} / Gamma(d/2)
};

/// Surface area of S^{d-1} and its Gamma-free lower bound; d >= 2.
SphereArea sphere_volume_lower(std::size_t d);

/// f(d) = (d/2) (e d/(d-1))^{d/2} (2 pi e/(d-1))^{1/2}, d >= 2.
double log_count_prefactor(std::size_t d);
double count_prefactor(std::size_t d);

/// Raw (unclamped) bound Q_{d,rho} <= f(d) (1-rho^2)^{(d-1)/2} rho^{1-d}.
double q_upper_bound(std::size_t d, double rho);

}  // namespace cordet
