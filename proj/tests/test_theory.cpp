#include <gtest/gtest.h>

#include <cmath>

#include "cordet/perms.hpp"
#include "cordet/theory.hpp"

namespace cordet {
namespace {

TEST(SumBound, Values) {
  EXPECT_NEAR(sum_test_risk_bound(60, 1.0), 0.735758882342884643, 1e-15);
  EXPECT_NEAR(sum_test_risk_bound(2000, std::sqrt(0.15)), 0.0134758939981709342, 1e-15);
  EXPECT_NEAR(sum_test_risk_bound(10, 1e-9), 2.0, 1e-15);
}

TEST(CountBounds, Values) {
  EXPECT_DOUBLE_EQ(count_test_bounds(1000, 3, 0.5).type2, 0.016);
  const auto b = count_test_bounds(100, 3, std::sqrt(0.99));
  EXPECT_NEAR(b.type1, 291.639832537507506, 1e-9);
  EXPECT_EQ(count_test_bounds(100, 3, 1.0).type1, 0.0);
  double prev = INFINITY;
  for (double rho = 0.5; rho < 1.0; rho += 0.05) {
    const double t1 = count_test_bounds(50, 4, rho).type1;
    EXPECT_LT(t1, prev);
    prev = t1;
  }
  EXPECT_THROW(count_test_bounds(10, 1, 0.5), std::invalid_argument);
}

TEST(DStar, Values) {
  EXPECT_DOUBLE_EQ(d_star(0.5), 1.0);
  EXPECT_NEAR(d_star(0.1), 21.8543453267828326, 1e-12);
  EXPECT_NEAR(d_star(0.9), 0.0457574905606751254, 1e-15);
  EXPECT_THROW(d_star(0.0), std::invalid_argument);
  EXPECT_THROW(d_star(1.0), std::invalid_argument);
}

TEST(DStar, StrictlyDecreasing) {
  double prev = d_star(1e-3);
  for (int i = 2; i < 1000; ++i) {
    const double cur = d_star(i * 1e-3);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(RhoStar, RoundTrip) {
  EXPECT_NEAR(rho_star_sq(1.0), 0.5, 1e-15);
  EXPECT_NEAR(rho_star_sq(21.8543453267828326), 0.1, 1e-13);
  std::vector<double> ds{0.5};
  for (int d = 1; d <= 50; ++d) {
    ds.push_back(d);
  }
  for (double d : ds) {
    EXPECT_LE(std::abs(d_star(rho_star_sq(d)) - d), 1e-10) << d;
  }
  EXPECT_THROW(rho_star_sq(0.0), std::invalid_argument);
  EXPECT_THROW(rho_star_sq(1e20), std::domain_error);
}

TEST(Chi2General, Values) {
  EXPECT_NEAR(chi2_general_bound(2, 1, std::sqrt(0.5)), std::exp(2.0), 1e-13);
  EXPECT_GE(chi2_general_bound(2, 1, std::sqrt(0.5)), 8.0 / 3.0);
  EXPECT_NEAR(chi2_general_bound(10, 5, 0.1), 1.65706920871156965, 1e-14);
  EXPECT_NEAR(chi2_general_bound(10, 5, 1e-9), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(chi2_general_bound(3, 3, 1.0)));
}

TEST(Chi2Refined, Values) {
  EXPECT_DOUBLE_EQ(refined_coefficient(2, 0.5), 48.0);
  EXPECT_NEAR(refined_coefficient(3, 0.2), 18.310546875, 1e-12);
  EXPECT_NEAR(chi2_refined_bound(3, std::sqrt(0.2)), 4.54005648281706762, 1e-12);
  EXPECT_NEAR(chi2_refined_bound(3, 1e-9), 1.0, 1e-15);
}

TEST(RiskLower, Values) {
  EXPECT_EQ(risk_lower_from_chi2(1.0), 1.0);
  EXPECT_DOUBLE_EQ(risk_lower_from_chi2(1.25), 0.75);
  EXPECT_EQ(risk_lower_from_chi2(5.0), 0.0);
  EXPECT_THROW(risk_lower_from_chi2(0.99), std::invalid_argument);
}

TEST(Regime, FixedDimensionImpossible) {
  const auto r = classify_regime(ModelParams(100, 3, std::sqrt(0.05)), AsymptoticHint::n_grows_d_fixed);
  EXPECT_EQ(r.regime, Regime::strong_impossible_fixed_d);
  ASSERT_TRUE(r.rho_star_sq_of_d.has_value());
  EXPECT_NEAR(d_star(*r.rho_star_sq_of_d), 3.0, 1e-10);
  EXPECT_TRUE(r.asymptotic_only);
}

TEST(Regime, WeakPossibleViaSum) {
  const double rho_sq = 60.0 * std::log(2.0) / 100.0 + 0.01;
  const auto r = classify_regime(ModelParams(50, 100, std::sqrt(rho_sq)), AsymptoticHint::both_grow);
  EXPECT_EQ(r.regime, Regime::weak_possible_sum);
  EXPECT_FALSE(r.asymptotic_only);
}

TEST(Regime, StrongPossibleViaCount) {
  for (std::size_t n : {100, 1000}) {
    for (std::size_t d : {2, 3, 5}) {
      const double rho_sq =
          1.0 - std::pow(static_cast<double>(n), -2.0 / (static_cast<double>(d) - 1.0)) / 10.0;
      const auto r = classify_regime(ModelParams(n, d, std::sqrt(rho_sq)),
                                     AsymptoticHint::n_grows_d_fixed);
      EXPECT_EQ(r.regime, Regime::strong_possible_count) << n << ' ' << d;
    }
  }
}

TEST(Regime, InverseDimensionImpossible) {
  const auto r = classify_regime(ModelParams(1000, 1000, std::sqrt(0.0005)),
                                 AsymptoticHint::d_grows_n_fixed);
  EXPECT_EQ(r.regime, Regime::strong_impossible_inverse_d);
  const auto mid = classify_regime(ModelParams(1000, 1000, std::sqrt(0.01)),
                                   AsymptoticHint::d_grows_n_fixed);
  EXPECT_EQ(mid.regime, Regime::undetermined);
}

TEST(Report, FieldsAreConsistent) {
  for (std::size_t n : {2, 7, 50, 200, 5000}) {
    for (std::size_t d : {1, 2, 10}) {
      for (double rho : {0.1, 0.5, 0.9, 1.0}) {
        for (auto hint : {AsymptoticHint::both_grow, AsymptoticHint::d_grows_n_fixed,
                          AsymptoticHint::n_grows_d_fixed}) {
          const auto r = classify_regime(ModelParams(n, d, rho), hint);
          ASSERT_TRUE(r.risk_lower.has_value());
          EXPECT_GE(*r.risk_lower, 0.0);
          EXPECT_LE(*r.risk_lower, 1.0);
          EXPECT_GE(r.sum_risk_bound, 0.0);
          if (r.second_moment && r.chi2_upper_general) {
            EXPECT_LE(*r.second_moment, *r.chi2_upper_general * (1.0 + 1e-12));
          }
          if (r.count_type1_bound) {
            EXPECT_GE(*r.count_type1_bound, 0.0);
          }
        }
      }
    }
  }
}

TEST(Report, RefinedBoundDoesNotGrowWithN) {
  const double rho = std::sqrt(0.2);
  ASSERT_LT(3.0, d_star(0.2));
  std::optional<double> first;
  for (std::size_t n : {10, 100, 1000, 100000}) {
    const auto r = classify_regime(ModelParams(n, 3, rho), AsymptoticHint::n_grows_d_fixed);
    ASSERT_TRUE(r.chi2_upper_refined.has_value());
    EXPECT_TRUE(std::isfinite(*r.chi2_upper_refined));
    if (!first) {
      first = r.chi2_upper_refined;
    }
    EXPECT_EQ(*r.chi2_upper_refined, *first);
    if (r.second_moment) {
      EXPECT_LE(*r.second_moment, *r.chi2_upper_refined);
    }
  }
}

TEST(Report, WithoutN) {
  const auto r = classify_regime(std::nullopt, 60, 1.0, AsymptoticHint::n_grows_d_fixed);
  EXPECT_NEAR(r.sum_risk_bound, 0.735758882342884643, 1e-15);
  EXPECT_FALSE(r.count_type1_bound.has_value());
  EXPECT_FALSE(r.risk_lower.has_value());
  EXPECT_EQ(r.regime, Regime::weak_possible_sum);
}

TEST(Report, JsonShape) {
  const auto j = to_json(classify_regime(ModelParams(100, 3, std::sqrt(0.05)),
                                         AsymptoticHint::n_grows_d_fixed));
  for (const char* key :
       {"params", "sum_risk_bound", "count_type1_bound", "count_type2_bound",
        "chi2_upper_general", "chi2_upper_refined", "risk_lower", "regime", "thresholds"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["regime"], "strong_impossible_fixed_d");
  EXPECT_EQ(j["params"]["n"], 100);
  EXPECT_TRUE(j["thresholds"]["rho_star_sq"].is_number());
  const auto inf = to_json(classify_regime(ModelParams(10, 10, 1.0), AsymptoticHint::both_grow));
  EXPECT_TRUE(inf["chi2_upper_general"].is_null());
}

TEST(Parsing, Hints) {
  EXPECT_EQ(parse_asymptotic_hint("both_grow"), AsymptoticHint::both_grow);
  EXPECT_EQ(to_string(AsymptoticHint::d_grows_n_fixed), "d_grows_n_fixed");
  EXPECT_THROW(parse_asymptotic_hint("sideways"), std::invalid_argument);
}

}  // namespace
}  // namespace cordet
