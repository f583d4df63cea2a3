#pragma once

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "cordet/model.hpp"

namespace cordet {

/// Risk envelope of the global-sum test: 2 exp(-d rho^2 / 60).
double sum_test_risk_bound(std::size_t d, double rho);

struct CountTestBounds {
  double type1 = 0.0;  // 8 f(d) n (rho^-2 - 1)^{(d-1)/2}
  double type2 = 0.0;  // 16 / n
};

/// Type-I and Type-II envelopes of the count test; d >= 2, 0 < |rho| <= 1.
CountTestBounds count_test_bounds(std::size_t n, std::size_t d, double rho);

/// d*(x) = log(x) / log(1 - x) for x = rho^2 in (0, 1). Strictly decreasing.
double d_star(double rho_sq);

/// Inverse of d_star: the x in (0,1) with d_star(x) = d. Bisection on
/// [1e-12, 1 - 1e-12] run until the bracket cannot shrink further.
/// Throws std::domain_error when d falls outside d_star of that bracket.
double rho_star_sq(double d);

/// Second-moment bound valid for every (n, d, rho): exp(n d rho^2 / (1 - rho^2)).
double log_chi2_general_bound(std::size_t n, std::size_t d, double rho);
double chi2_general_bound(std::size_t n, std::size_t d, double rho);

/// c(d, rho^2) = d (d+1) / (2 (1 - rho^2)^{d+2}).
double refined_coefficient(std::size_t d, double rho_sq);

/// exp(d rho^2/(1-rho^2) + c(d,rho^2) rho^4/(1-rho^4)); the n-free
/// envelope of the Poisson cycle model.
double log_chi2_refined_bound(std::size_t d, double rho);
double chi2_refined_bound(std::size_t d, double rho);

/// Minimax risk floor max(0, 1 - sqrt(E_0[L^2] - 1) / 2). Throws
/// std::invalid_argument for second_moment < 1.
double risk_lower_from_chi2(double second_moment);

enum class AsymptoticHint { both_grow, d_grows_n_fixed, n_grows_d_fixed };

enum class Regime {
  weak_possible_sum,
  strong_possible_count,
  strong_impossible_fixed_d,
  strong_impossible_inverse_d,
  undetermined,
};

std::string_view to_string(AsymptoticHint hint) noexcept;
std::string_view to_string(Regime regime) noexcept;
/// Human-readable sentence for a regime.
std::string_view describe(Regime regime) noexcept;
AsymptoticHint parse_asymptotic_hint(std::string_view name);

/// Every closed-form quantity at one parameter point plus its phase-diagram
/// cell. Optional fields are absent where the formula does not apply or
/// diverges.
struct BoundReport {
  std::optional<std::size_t> n;  // absent: n-dependent fields are absent too
  std::size_t d = 1;
  double rho = 1.0;
  AsymptoticHint hint = AsymptoticHint::n_grows_d_fixed;

  double sum_risk_bound = 0.0;
  std::optional<double> count_type1_bound;
  std::optional<double> count_type2_bound;
  std::optional<double> chi2_upper_general;
  std::optional<double> chi2_upper_refined;
  std::optional<double> second_moment;
  std::string second_moment_method;  // "enumeration", "recurrence" or ""
  std::optional<double> risk_lower;  // present whenever n is

  // Thresholds on rho^2 the classification compares against.
  double one_over_d = 0.0;
  double sum_weak_threshold = 0.0;                  // 60 log 2 / d
  std::optional<double> rho_star_sq_of_d;           // rho*(d)
  std::optional<double> count_strong_threshold;     // 1 - n^{-2/(d-1)}
  std::optional<double> d_star_of_rho;              // d*(rho^2)

  Regime regime = Regime::undetermined;
  bool asymptotic_only = false;
};

/// Largest n for which the report evaluates E_0[L^2] exactly.
inline constexpr std::size_t kReportSecondMomentMaxN = 4096;

BoundReport classify_regime(const ModelParams& params, AsymptoticHint hint);

/// Same with n unknown; (d, rho) are validated as ModelParams would.
BoundReport classify_regime(std::optional<std::size_t> n, std::size_t d, double rho,
                            AsymptoticHint hint);

/// Stable snake_case JSON rendering; non-finite or absent values are null.
nlohmann::json to_json(const BoundReport& report);

}  // namespace cordet
