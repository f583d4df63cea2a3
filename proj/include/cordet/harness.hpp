#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cordet/detect.hpp"
#include "cordet/model.hpp"
#include "cordet/permutation.hpp"
#include "cordet/rng.hpp"
#include "cordet/theory.hpp"

namespace cordet {

/// How the planted permutation is chosen under H1.
///
/// All three tests are invariant to relabelling the rows of Y, so the
/// worst case over sigma equals the value at any fixed sigma; fixed(Id) is
/// the default. `uniform` averages over S_n and estimates the Bayesian risk.
class SigmaMode {
 public:
  enum class Kind { fixed, uniform };

  /// fixed(Id), resolved to the identity of size n at run time.
  SigmaMode() = default;
  static SigmaMode fixed(Permutation sigma);
  static SigmaMode identity() { return {}; }
  static SigmaMode uniform();

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// The fixed permutation, or the identity of size n when none was given.
  [[nodiscard]] Permutation resolve(std::size_t n) const;
  /// "id", "uniform" or "fixed:[2 1 3]".
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const SigmaMode&, const SigmaMode&) = default;

 private:
  Kind kind_ = Kind::fixed;
  std::optional<Permutation> sigma_;
};

struct WilsonInterval {
  double lower = 0.0;
  double upper = 0.0;
  [[nodiscard]] double half_width() const noexcept { return 0.5 * (upper - lower); }
  [[nodiscard]] bool contains(double p) const noexcept { return lower <= p && p <= upper; }

  friend bool operator==(const WilsonInterval&, const WilsonInterval&) = default;
};

inline constexpr double kWilsonZ95 = 1.959964;

/// Wilson score interval for `successes` out of `trials`.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                               double z = kWilsonZ95);

/// Empirical Type-I / Type-II rates of one test at one parameter point.
struct RiskEstimate {
  double type1_hat = 0.0;
  double type2_hat = 0.0;
  double risk_hat = 0.0;  // type1_hat + type2_hat, in [0, 2]
  std::size_t trials = 0;  // per hypothesis
  std::uint64_t type1_errors = 0;
  std::uint64_t type2_errors = 0;
  WilsonInterval type1_ci;
  WilsonInterval type2_ci;
  double type1_std_error = 0.0;  // binomial sqrt(p(1-p)/trials)
  double type2_std_error = 0.0;
  std::uint64_t master_seed = 0;
  SigmaMode sigma_mode;

  /// sqrt(se1^2 + se2^2).
  [[nodiscard]] double risk_std_error() const noexcept;

  friend bool operator==(const RiskEstimate&, const RiskEstimate&) = default;
};

/// Smallest trial count estimate_risk accepts.
inline constexpr std::size_t kMinRiskTrials = 100;

/// Test with its configuration filled in for `params`. The count test takes
/// its threshold from a pinned-seed Monte Carlo P_{d,rho} unless `source`
/// asks for the 1/4 bound.
DetectionTest make_test(TestKind kind, const ModelParams& params,
                        PSource source = PSource::monte_carlo);

/// Runs `trials` H0 and `trials` H1 samples. Trial t under hypothesis h
/// draws from rng.child(h).child(t), so the estimate depends only on the
/// inputs and the seed, never on `threads`.
RiskEstimate estimate_risk(const DetectionTest& test, const ModelParams& params,
                           std::size_t trials, const SigmaMode& sigma_mode, const RngStream& rng,
                           unsigned threads = 0);

struct SweepPoint {
  std::size_t n = 0;
  std::size_t d = 0;
  double rho = 0.0;
};

struct SweepRecord {
  SweepPoint point;
  TestKind test = TestKind::sum;
  std::optional<CountTestConfig> count_config;  // count test only
  std::optional<RiskEstimate> estimate;
  std::optional<BoundReport> bounds;
  std::string error;  // empty on success
};

struct SweepOptions {
  std::size_t trials = 1000;
  SigmaMode sigma_mode;
  PSource p_source = PSource::monte_carlo;
  AsymptoticHint hint = AsymptoticHint::n_grows_d_fixed;
  unsigned threads = 0;
};

/// One record per (point, test). Every point uses the same stream `rng`
/// (common random numbers). A failing point is recorded and skipped.
std::vector<SweepRecord> sweep(const std::vector<SweepPoint>& grid,
                               const std::vector<TestKind>& tests, const SweepOptions& options,
                               const RngStream& rng);

/// Column names of the sweep CSV, in order.
const std::vector<std::string>& sweep_csv_columns();

void write_sweep_csv_header(std::ostream& out);
void write_sweep_csv_row(std::ostream& out, const SweepRecord& record);

nlohmann::json to_json(const RiskEstimate& estimate);
nlohmann::json to_json(const SweepRecord& record);

}  // namespace cordet
