#include "cordet/verify.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cordet/assignment.hpp"
#include "cordet/numerics.hpp"
#include "cordet/perms.hpp"
#include "cordet/theory.hpp"

namespace cordet {

namespace {

constexpr std::size_t kCycleTrials = 200000;
constexpr std::size_t kOverlapSamples = 1000000;
constexpr std::size_t kPoissonTrials = 200000;
constexpr std::size_t kAssignmentCases = 200;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

class Recorder {
 public:
  explicit Recorder(std::string suite) : suite_(std::move(suite)) {}

  void check(std::string name, bool passed, std::string detail) {
    out_.push_back({suite_, std::move(name), passed, std::move(detail)});
  }

  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  std::string suite_;
  std::vector<CheckResult> out_;
};

std::size_t trials_or(const VerifyOptions& o, std::size_t fallback) {
  return o.trials == 0 ? fallback : o.trials;
}

std::vector<CheckResult> suite_perms(const VerifyOptions& o) {
  if (o.n_max == 0 || o.n_max > kMaxBruteForceN) {
    throw std::invalid_argument("verify perms: --n-max must lie in [1, 8]");
  }
  Recorder rec("perms");
  constexpr std::array<double, 3> rhos{0.2, 0.5, 0.8};
  for (std::size_t n = 1; n <= o.n_max; ++n) {
    double worst = 0.0;
    for (std::size_t d = 1; d <= 3; ++d) {
      for (double rho : rhos) {
        const ModelParams p(n, d, rho);
        const double exact = second_moment_exact(p);
        const double brute = second_moment_bruteforce(p);
        worst = std::max(worst, std::abs(exact - brute) / brute);
      }
    }
    rec.check("second_moment n=" + std::to_string(n), worst <= 1e-12,
              "max relative gap " + fmt(worst));
    BigInt total = 0;
    for (const auto& t : enumerate_cycle_types(n)) {
      total += t.count;
    }
    BigInt factorial = 1;
    for (std::size_t i = 2; i <= n; ++i) {
      factorial *= i;
    }
    rec.check("type counts n=" + std::to_string(n), total == factorial,
              "sum " + total.str() + " vs n! " + factorial.str());
  }
  return rec.take();
}

std::vector<CheckResult> suite_cycle_factor(const VerifyOptions& o) {
  struct Case {
    std::size_t k, d;
    double rho;
  };
  std::vector<Case> cases;
  if (o.k || o.d || o.rho) {
    if (!(o.k && o.d && o.rho)) {
      throw std::invalid_argument("verify lemma-cycle: give all of --k, --d, --rho or none");
    }
    cases.push_back({*o.k, *o.d, *o.rho});
  } else {
    cases = {{1, 1, 0.3}, {2, 2, 0.3}, {3, 2, 0.25}};
  }
  Recorder rec("lemma-cycle");
  const std::size_t trials = trials_or(o, kCycleTrials);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const double exact = cycle_factor_exact(c.k, c.d, c.rho);
    const auto mc = cycle_factor_mc(c.k, c.d, c.rho, trials, RngStream{o.seed, 100 + i}, o.threads);
    const double z = std::abs(mc.estimate - exact) / mc.std_error;
    rec.check("k=" + std::to_string(c.k) + " d=" + std::to_string(c.d) + " rho=" + fmt(c.rho),
              z <= 3.0,
              "mc " + fmt(mc.estimate) + " +- " + fmt(mc.std_error) + ", exact " + fmt(exact));
  }
  return rec.take();
}

std::vector<CheckResult> suite_overlap(const VerifyOptions& o) {
  Recorder rec("overlap");
  const double q = q_exact(3, 0.4).value;
  rec.check("q_exact(3, 0.4) = 0.3", std::abs(q - 0.3) <= 1e-12, "value " + fmt(q));
  const std::size_t samples = trials_or(o, kOverlapSamples);
  constexpr std::array<double, 3> rhos{0.1, 0.5, 0.9};
  constexpr std::array<std::size_t, 4> dims{2, 3, 5, 10};
  for (std::size_t di = 0; di < dims.size(); ++di) {
    const std::size_t d = dims[di];
    const auto mc = q_sphere_mc(d, rhos, samples, RngStream{o.seed, 200 + di}, o.threads);
    for (std::size_t r = 0; r < rhos.size(); ++r) {
      const double exact = q_exact(d, rhos[r]).value;
      const double se = std::max(mc[r].std_error, 1.0 / static_cast<double>(samples));
      rec.check("q d=" + std::to_string(d) + " rho=" + fmt(rhos[r]),
                std::abs(mc[r].value - exact) <= 4.0 * se,
                "mc " + fmt(mc[r].value) + ", exact " + fmt(exact));
      const auto p = p_mc(d, rhos[r], samples / 10, RngStream{o.seed, 300 + 10 * di + r},
                          o.threads);
      rec.check("p >= 1/4 d=" + std::to_string(d) + " rho=" + fmt(rhos[r]),
                p.value >= 0.25 - 3.0 * p.std_error, "p_mc " + fmt(p.value));
    }
  }
  return rec.take();
}

std::vector<CheckResult> suite_bounds(const VerifyOptions& o) {
  Recorder rec("bounds");
  std::size_t points = 0;
  std::size_t violations = 0;
  const std::size_t n_top = std::min(o.n_max, kMaxBruteForceN);
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n <= n_top; ++n) {
    ns.push_back(n);
  }
  for (std::size_t n : {10, 20, 50}) {
    ns.push_back(n);
  }
  for (std::size_t n : ns) {
    for (std::size_t d = 1; d <= 4; ++d) {
      for (double rho_sq : {0.04, 0.1, 0.2, 0.25, 0.4, 0.5, 0.6, 0.64}) {
        const double rho = std::sqrt(rho_sq);
        ++points;
        if (!(second_moment_exact(ModelParams(n, d, rho)) <= chi2_general_bound(n, d, rho))) {
          ++violations;
        }
      }
    }
  }
  rec.check("second moment <= general bound", violations == 0,
            std::to_string(violations) + " violations on " + std::to_string(points) + " points");

  double worst = 0.0;
  std::vector<double> targets{0.5};
  for (int d = 1; d <= 50; ++d) {
    targets.push_back(d);
  }
  for (double d : targets) {
    worst = std::max(worst, std::abs(d_star(rho_star_sq(d)) - d));
  }
  rec.check("threshold round trip", worst <= 1e-10, "max error " + fmt(worst));
  const double half = rho_star_sq(1.0);
  rec.check("rho_star_sq(1) = 1/2", std::abs(half - 0.5) <= 1e-12, "value " + fmt(half));

  bool monotone = true;
  double prev = d_star(1e-3);
  for (int i = 2; i < 1000; ++i) {
    const double cur = d_star(i * 1e-3);
    monotone = monotone && cur < prev;
    prev = cur;
  }
  rec.check("d_star strictly decreasing", monotone, "1000-point grid");
  return rec.take();
}

std::vector<CheckResult> suite_poisson(const VerifyOptions& o) {
  Recorder rec("poisson");
  const std::size_t trials = trials_or(o, kPoissonTrials);
  const double exact = poisson_product_closed_form(3, 2, 0.4);
  const auto mc = poisson_product_mc(3, 2, 0.4, trials, RngStream{o.seed, 400}, o.threads);
  rec.check("closed form m=3 d=2 rho=0.4", std::abs(mc.estimate - exact) <= 3.0 * mc.std_error,
            "mc " + fmt(mc.estimate) + " +- " + fmt(mc.std_error) + ", exact " + fmt(exact));
  std::size_t violations = 0;
  std::size_t points = 0;
  for (std::size_t m = 1; m <= 50; ++m) {
    for (std::size_t d = 1; d <= 20; ++d) {
      for (int r = 1; r <= 10; ++r) {
        const double rho = std::sqrt(0.05 * r);
        ++points;
        if (!(log_poisson_product(m, d, rho) <= log_chi2_refined_bound(d, rho))) {
          ++violations;
        }
      }
    }
  }
  rec.check("closed form <= refined bound", violations == 0,
            std::to_string(violations) + " violations on " + std::to_string(points) + " points");
  return rec.take();
}

std::vector<CheckResult> suite_assignment(const VerifyOptions& o) {
  Recorder rec("assignment");
  auto engine = RngStream{o.seed, 500}.engine();
  std::normal_distribution<double> normal;
  std::size_t mismatches = 0;
  std::size_t bad_duals = 0;
  for (std::size_t c = 0; c < kAssignmentCases; ++c) {
    Eigen::MatrixXd score(7, 7);
    for (Eigen::Index i = 0; i < score.size(); ++i) {
      score.data()[i] = normal(engine);
    }
    const auto fast = solve_assignment(score);
    const auto [perm, value] = assignment_bruteforce(score);
    if (fast.value != value || !(fast.assignment == perm)) {
      ++mismatches;
    }
    const Eigen::MatrixXd slack =
        fast.row_dual.replicate(1, 7) + fast.col_dual.transpose().replicate(7, 1) - score;
    if (slack.minCoeff() < -1e-9) {
      ++bad_duals;
    }
  }
  rec.check("hungarian = exhaustive (7x7)", mismatches == 0,
            std::to_string(mismatches) + " mismatches in " + std::to_string(kAssignmentCases));
  rec.check("dual feasibility", bad_duals == 0, std::to_string(bad_duals) + " infeasible");
  return rec.take();
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"perms",  "lemma-cycle", "overlap",
                                              "bounds", "poisson",     "assignment"};
  return names;
}

std::vector<CheckResult> run_verify(std::string_view suite, const VerifyOptions& options) {
  if (suite == "all") {
    std::vector<CheckResult> all;
    for (const auto& name : verify_suite_names()) {
      auto part = run_verify(name, options);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  if (suite == "perms") {
    return suite_perms(options);
  }
  if (suite == "lemma-cycle") {
    return suite_cycle_factor(options);
  }
  if (suite == "overlap") {
    return suite_overlap(options);
  }
  if (suite == "bounds") {
    return suite_bounds(options);
  }
  if (suite == "poisson") {
    return suite_poisson(options);
  }
  if (suite == "assignment") {
    return suite_assignment(options);
  }
  throw std::invalid_argument("unknown verify suite '" + std::string(suite) + "'");
}

}  // namespace cordet
