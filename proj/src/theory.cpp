#include "cordet/theory.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cordet/numerics.hpp"
#include "cordet/perms.hpp"

namespace cordet {

namespace {

constexpr double kRhoStarLow = 1e-12;
constexpr double kRhoStarHigh = 1.0 - 1e-12;

void check_rho(double rho, const char* where) {
  if (!std::isfinite(rho) || std::abs(rho) > 1.0) {
    throw std::invalid_argument(std::string(where) + ": requires |rho| <= 1");
  }
}

std::optional<double> finite_or_empty(double v) {
  if (std::isfinite(v)) {
    return v;
  }
  return std::nullopt;
}

}  // namespace

double sum_test_risk_bound(std::size_t d, double rho) {
  check_rho(rho, "sum_test_risk_bound");
  return 2.0 * std::exp(-static_cast<double>(d) * rho * rho / 60.0);
}

CountTestBounds count_test_bounds(std::size_t n, std::size_t d, double rho) {
  if (n == 0) {
    throw std::invalid_argument("count_test_bounds: n must be positive");
  }
  const double r = std::abs(rho);
  if (d < 2 || !(r > 0.0 && r <= 1.0)) {
    throw std::invalid_argument("count_test_bounds: requires d >= 2 and 0 < |rho| <= 1");
  }
  const double dm1 = static_cast<double>(d - 1);
  const double ratio = (1.0 - r) * (1.0 + r) / (r * r);  // rho^-2 - 1
  CountTestBounds out;
  out.type1 = ratio == 0.0 ? 0.0
                           : std::exp(std::log(8.0) + log_count_prefactor(d) +
                                      std::log(static_cast<double>(n)) + 0.5 * dm1 * std::log(ratio));
  out.type2 = 16.0 / static_cast<double>(n);
  return out;
}

double d_star(double rho_sq) {
  if (!(rho_sq > 0.0 && rho_sq < 1.0)) {
    throw std::invalid_argument("d_star: requires rho^2 in (0, 1)");
  }
  return std::log(rho_sq) / std::log1p(-rho_sq);
}

double rho_star_sq(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw std::invalid_argument("rho_star_sq: requires d > 0");
  }
  double lo = kRhoStarLow;   // d_star(lo) is the largest value
  double hi = kRhoStarHigh;  // d_star(hi) is the smallest value
  if (d > d_star(lo) || d < d_star(hi)) {
    throw std::domain_error("rho_star_sq: d outside the invertible range of the bracket");
  }
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (d_star(mid) > d) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(d_star(lo) - d) <= std::abs(d_star(hi) - d) ? lo : hi;
}

double log_chi2_general_bound(std::size_t n, std::size_t d, double rho) {
  check_rho(rho, "chi2_general_bound");
  const double rho_sq = rho * rho;
  if (rho_sq >= 1.0) {
    return std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(n) * static_cast<double>(d) * rho_sq / ((1.0 - rho) * (1.0 + rho));
}

double chi2_general_bound(std::size_t n, std::size_t d, double rho) {
  return std::exp(log_chi2_general_bound(n, d, rho));
}

double refined_coefficient(std::size_t d, double rho_sq) {
  const double dd = static_cast<double>(d);
  return dd * (dd + 1.0) / (2.0 * std::exp((dd + 2.0) * std::log1p(-rho_sq)));
}

double log_chi2_refined_bound(std::size_t d, double rho) {
  check_rho(rho, "chi2_refined_bound");
  const double rho_sq = rho * rho;
  if (rho_sq >= 1.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double rho_4 = rho_sq * rho_sq;
  return static_cast<double>(d) * rho_sq / ((1.0 - rho) * (1.0 + rho)) +
         refined_coefficient(d, rho_sq) * rho_4 / (1.0 - rho_4);
}

double chi2_refined_bound(std::size_t d, double rho) {
  return std::exp(log_chi2_refined_bound(d, rho));
}

double risk_lower_from_chi2(double second_moment) {
  if (!(second_moment >= 1.0)) {
    throw std::invalid_argument("risk_lower_from_chi2: second moment must be >= 1");
  }
  return std::max(0.0, 1.0 - 0.5 * std::sqrt(second_moment - 1.0));
}

std::string_view to_string(AsymptoticHint hint) noexcept {
  switch (hint) {
    case AsymptoticHint::both_grow:
      return "both_grow";
    case AsymptoticHint::d_grows_n_fixed:
      return "d_grows_n_fixed";
    case AsymptoticHint::n_grows_d_fixed:
      return "n_grows_d_fixed";
  }
  return "unknown";
}

AsymptoticHint parse_asymptotic_hint(std::string_view name) {
  if (name == "both_grow") {
    return AsymptoticHint::both_grow;
  }
  if (name == "d_grows_n_fixed") {
    return AsymptoticHint::d_grows_n_fixed;
  }
  if (name == "n_grows_d_fixed") {
    return AsymptoticHint::n_grows_d_fixed;
  }
  throw std::invalid_argument("unknown asymptotic hint '" + std::string(name) + "'");
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::weak_possible_sum:
      return "weak_possible_sum";
    case Regime::strong_possible_count:
      return "strong_possible_count";
    case Regime::strong_impossible_fixed_d:
      return "strong_impossible_fixed_d";
    case Regime::strong_impossible_inverse_d:
      return "strong_impossible_inverse_d";
    case Regime::undetermined:
      return "undetermined";
  }
  return "unknown";
}

std::string_view describe(Regime regime) noexcept {
  switch (regime) {
    case Regime::weak_possible_sum:
      return "weak detection possible via the sum test (rho^2 >= 60 log 2 / d)";
    case Regime::strong_possible_count:
      return "strong detection possible via the count test (rho^2 > 1 - n^(-2/(d-1)))";
    case Regime::strong_impossible_fixed_d:
      return "strong detection impossible (fixed d, rho^2 < rho_star(d))";
    case Regime::strong_impossible_inverse_d:
      return "strong detection impossible (rho^2 < 1/d)";
    case Regime::undetermined:
      return "between the known thresholds";
  }
  return "unknown";
}

BoundReport classify_regime(const ModelParams& params, AsymptoticHint hint) {
  return classify_regime(params.n(), params.d(), params.rho(), hint);
}

BoundReport classify_regime(std::optional<std::size_t> n, std::size_t d, double rho,
                            AsymptoticHint hint) {
  const ModelParams params(n.value_or(1), d, rho);
  const double rho_sq = params.rho_sq();
  const double dd = static_cast<double>(d);
  const bool below_one = rho_sq < 1.0;

  BoundReport r;
  r.n = n;
  r.d = d;
  r.rho = rho;
  r.hint = hint;
  r.sum_risk_bound = sum_test_risk_bound(d, rho);
  r.one_over_d = 1.0 / dd;
  r.sum_weak_threshold = 60.0 * std::numbers::ln2 / dd;
  try {
    r.rho_star_sq_of_d = rho_star_sq(dd);
  } catch (const std::domain_error&) {
  }
  if (below_one) {
    r.d_star_of_rho = d_star(rho_sq);
  }

  if (n) {
    if (d >= 2) {
      const auto count = count_test_bounds(*n, d, rho);
      r.count_type1_bound = finite_or_empty(count.type1);
      r.count_type2_bound = count.type2;
      r.count_strong_threshold =
          1.0 - std::exp(-2.0 / (dd - 1.0) * std::log(static_cast<double>(*n)));
    }
    r.chi2_upper_general = finite_or_empty(chi2_general_bound(*n, d, rho));
    if (below_one && *n <= kReportSecondMomentMaxN) {
      r.second_moment =
          *n <= kMaxCycleTypeN ? second_moment_exact(params) : second_moment_recurrence(params);
      r.second_moment_method =
          *n <= kMaxMaterializedN ? "enumeration" : "recurrence";
      if (!std::isfinite(*r.second_moment)) {
        r.second_moment.reset();
        r.second_moment_method.clear();
      }
    }
    if (r.second_moment) {
      r.risk_lower = risk_lower_from_chi2(*r.second_moment);
    } else if (r.chi2_upper_general) {
      r.risk_lower = risk_lower_from_chi2(*r.chi2_upper_general);
    } else {
      r.risk_lower = 0.0;  // divergent second moment: no floor
    }
  }

  switch (hint) {
    case AsymptoticHint::n_grows_d_fixed:
      if (r.count_strong_threshold && rho_sq > *r.count_strong_threshold) {
        r.regime = Regime::strong_possible_count;
        r.asymptotic_only = true;
      } else if (r.rho_star_sq_of_d && rho_sq < *r.rho_star_sq_of_d) {
        r.regime = Regime::strong_impossible_fixed_d;
        r.asymptotic_only = true;
      } else if (rho_sq >= r.sum_weak_threshold) {
        r.regime = Regime::weak_possible_sum;
      }
      if (r.d_star_of_rho && dd < *r.d_star_of_rho) {
        r.chi2_upper_refined = finite_or_empty(chi2_refined_bound(d, rho));
      }
      break;
    case AsymptoticHint::both_grow:
    case AsymptoticHint::d_grows_n_fixed:
      if (rho_sq >= r.sum_weak_threshold) {
        r.regime = Regime::weak_possible_sum;
      } else if (rho_sq < r.one_over_d) {
        r.regime = Regime::strong_impossible_inverse_d;
        r.asymptotic_only = true;
      }
      if (hint == AsymptoticHint::both_grow && rho_sq * dd < 1.0) {
        r.chi2_upper_refined = finite_or_empty(chi2_refined_bound(d, rho));
      }
      break;
  }
  return r;
}

nlohmann::json to_json(const BoundReport& report) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    if (v && std::isfinite(*v)) {
      return *v;
    }
    return nullptr;
  };
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) {
      return v;
    }
    return nullptr;
  };
  nlohmann::json j;
  j["params"] = {{"n", report.n ? nlohmann::json(*report.n) : nlohmann::json(nullptr)},
                 {"d", report.d},
                 {"rho", report.rho},
                 {"rho_sq", report.rho * report.rho}};
  j["asymptotic_hint"] = std::string(to_string(report.hint));
  j["sum_risk_bound"] = num(report.sum_risk_bound);
  j["count_type1_bound"] = opt(report.count_type1_bound);
  j["count_type2_bound"] = opt(report.count_type2_bound);
  j["chi2_upper_general"] = opt(report.chi2_upper_general);
  j["chi2_upper_refined"] = opt(report.chi2_upper_refined);
  j["second_moment"] = opt(report.second_moment);
  j["second_moment_method"] = report.second_moment_method;
  j["risk_lower"] = opt(report.risk_lower);
  j["thresholds"] = {{"one_over_d", num(report.one_over_d)},
                     {"sum_weak", num(report.sum_weak_threshold)},
                     {"rho_star_sq", opt(report.rho_star_sq_of_d)},
                     {"count_strong", opt(report.count_strong_threshold)},
                     {"d_star", opt(report.d_star_of_rho)}};
  j["regime"] = std::string(to_string(report.regime));
  j["regime_description"] = std::string(describe(report.regime));
  j["asymptotic_only"] = report.asymptotic_only;
  return j;
}

}  // namespace cordet
