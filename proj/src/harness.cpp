#include "cordet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cordet/parallel.hpp"

namespace cordet {

namespace {

constexpr std::size_t kTrialBlock = 32;

std::uint64_t count_rejections(std::size_t trials, unsigned threads,
                               const std::function<bool(std::size_t)>& trial) {
  const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<std::uint64_t> partial(blocks, 0);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(trials, (b + 1) * kTrialBlock);
    std::uint64_t hits = 0;
    for (std::size_t t = b * kTrialBlock; t < end; ++t) {
      hits += trial(t) ? 1 : 0;
    }
    partial[b] = hits;
  });
  std::uint64_t total = 0;
  for (auto h : partial) {
    total += h;
  }
  return total;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string optional_cell(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? format_double(*v) : std::string();
}

}  // namespace

SigmaMode SigmaMode::fixed(Permutation sigma) {
  SigmaMode mode;
  mode.sigma_ = std::move(sigma);
  return mode;
}

SigmaMode SigmaMode::uniform() {
  SigmaMode mode;
  mode.kind_ = Kind::uniform;
  return mode;
}

Permutation SigmaMode::resolve(std::size_t n) const {
  if (kind_ == Kind::uniform) {
    throw std::logic_error("SigmaMode::resolve: uniform mode has no fixed permutation");
  }
  if (!sigma_) {
    return Permutation::identity(n);
  }
  if (sigma_->size() != n) {
    throw std::invalid_argument("SigmaMode: permutation size " + std::to_string(sigma_->size()) +
                                " does not match n = " + std::to_string(n));
  }
  return *sigma_;
}

std::string SigmaMode::to_string() const {
  if (kind_ == Kind::uniform) {
    return "uniform";
  }
  if (!sigma_ || sigma_->is_identity()) {
    return "id";
  }
  return "fixed:" + sigma_->to_string();
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: need 0 <= successes <= trials, trials > 0");
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == trials ? 1.0 : std::min(1.0, center + half)};
}

double RiskEstimate::risk_std_error() const noexcept {
  return std::hypot(type1_std_error, type2_std_error);
}

DetectionTest make_test(TestKind kind, const ModelParams& params, PSource source) {
  DetectionTest test;
  test.kind = kind;
  if (kind == TestKind::count) {
    test.count = source == PSource::monte_carlo
                     ? CountTestConfig::monte_carlo(params.d(), params.rho())
                     : CountTestConfig::quarter_bound();
  }
  return test;
}

RiskEstimate estimate_risk(const DetectionTest& test, const ModelParams& params,
                           std::size_t trials, const SigmaMode& sigma_mode, const RngStream& rng,
                           unsigned threads) {
  if (trials < kMinRiskTrials) {
    throw std::invalid_argument("estimate_risk: trials must be >= " +
                                std::to_string(kMinRiskTrials));
  }
  const RngStream null_rng = rng.child(0);
  const RngStream alt_rng = rng.child(1);
  const bool uniform = sigma_mode.kind() == SigmaMode::Kind::uniform;
  const Permutation sigma = uniform ? Permutation{} : sigma_mode.resolve(params.n());

  const std::uint64_t false_alarms = count_rejections(trials, threads, [&](std::size_t t) {
    const auto db = sample_null(params, null_rng.child(t));
    return apply_test(test, db, params).decision;
  });
  const std::uint64_t detections = count_rejections(trials, threads, [&](std::size_t t) {
    if (uniform) {
      const auto sample = sample_alt_uniform(params, alt_rng.child(t));
      return apply_test(test, sample.first, params).decision;
    }
    const auto db = sample_alt(params, sigma, alt_rng.child(t));
    return apply_test(test, db, params).decision;
  });

  RiskEstimate out;
  const double n = static_cast<double>(trials);
  out.trials = trials;
  out.type1_errors = false_alarms;
  out.type2_errors = trials - detections;
  out.type1_hat = static_cast<double>(out.type1_errors) / n;
  out.type2_hat = static_cast<double>(out.type2_errors) / n;
  out.risk_hat = out.type1_hat + out.type2_hat;
  out.type1_ci = wilson_interval(out.type1_errors, trials);
  out.type2_ci = wilson_interval(out.type2_errors, trials);
  out.type1_std_error = std::sqrt(out.type1_hat * (1.0 - out.type1_hat) / n);
  out.type2_std_error = std::sqrt(out.type2_hat * (1.0 - out.type2_hat) / n);
  out.master_seed = rng.master_seed;
  out.sigma_mode = sigma_mode;
  return out;
}

std::vector<SweepRecord> sweep(const std::vector<SweepPoint>& grid,
                               const std::vector<TestKind>& tests, const SweepOptions& options,
                               const RngStream& rng) {
  if (grid.empty()) {
    throw std::invalid_argument("sweep: empty grid");
  }
  if (tests.empty()) {
    throw std::invalid_argument("sweep: no tests requested");
  }
  std::vector<SweepRecord> records;
  records.reserve(grid.size() * tests.size());
  for (const auto& point : grid) {
    std::optional<ModelParams> params;
    std::optional<BoundReport> bounds;
    std::string point_error;
    try {
      params.emplace(point.n, point.d, point.rho);
      bounds = classify_regime(*params, options.hint);
    } catch (const std::exception& e) {
      point_error = e.what();
    }
    for (TestKind kind : tests) {
      SweepRecord record;
      record.point = point;
      record.test = kind;
      record.bounds = bounds;
      record.error = point_error;
      if (params && point_error.empty()) {
        try {
          const DetectionTest test = make_test(kind, *params, options.p_source);
          if (kind == TestKind::count) {
            record.count_config = test.count;
          }
          record.estimate =
              estimate_risk(test, *params, options.trials, options.sigma_mode, rng, options.threads);
        } catch (const std::exception& e) {
          record.error = e.what();
        }
      }
      records.push_back(std::move(record));
    }
  }
  return records;
}

const std::vector<std::string>& sweep_csv_columns() {
  static const std::vector<std::string> columns{
      "n",        "d",         "rho",      "rho_sq",         "test",           "trials",
      "type1_hat", "type1_ci", "type2_hat", "type2_ci",      "risk_hat",       "seed",
      "bound_sum_risk", "bound_count_t1", "bound_count_t2", "chi2_general", "risk_lower",
      "regime"};
  return columns;
}

void write_sweep_csv_header(std::ostream& out) {
  const auto& columns = sweep_csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i ? "," : "") << columns[i];
  }
  out << '\n';
}

void write_sweep_csv_row(std::ostream& out, const SweepRecord& r) {
  const auto& p = r.point;
  out << p.n << ',' << p.d << ',' << format_double(p.rho) << ',' << format_double(p.rho * p.rho)
      << ',' << to_string(r.test) << ',';
  if (r.estimate) {
    const auto& e = *r.estimate;
    out << e.trials << ',' << format_double(e.type1_hat) << ','
        << format_double(e.type1_ci.half_width()) << ',' << format_double(e.type2_hat) << ','
        << format_double(e.type2_ci.half_width()) << ',' << format_double(e.risk_hat) << ','
        << e.master_seed << ',';
  } else {
    out << ",,,,,,,";
  }
  if (r.bounds) {
    const auto& b = *r.bounds;
    out << format_double(b.sum_risk_bound) << ',' << optional_cell(b.count_type1_bound) << ','
        << optional_cell(b.count_type2_bound) << ',' << optional_cell(b.chi2_upper_general) << ','
        << optional_cell(b.risk_lower) << ',';
  } else {
    out << ",,,,,";
  }
  out << (r.error.empty() && r.bounds ? std::string(to_string(r.bounds->regime)) : "error")
      << '\n';
}

nlohmann::json to_json(const RiskEstimate& e) {
  return {{"type1_hat", e.type1_hat},
          {"type2_hat", e.type2_hat},
          {"risk_hat", e.risk_hat},
          {"trials", e.trials},
          {"type1_errors", e.type1_errors},
          {"type2_errors", e.type2_errors},
          {"type1_ci", {{"lower", e.type1_ci.lower}, {"upper", e.type1_ci.upper},
                        {"half_width", e.type1_ci.half_width()}}},
          {"type2_ci", {{"lower", e.type2_ci.lower}, {"upper", e.type2_ci.upper},
                        {"half_width", e.type2_ci.half_width()}}},
          {"type1_std_error", e.type1_std_error},
          {"type2_std_error", e.type2_std_error},
          {"master_seed", e.master_seed},
          {"sigma_mode", e.sigma_mode.to_string()}};
}

nlohmann::json to_json(const SweepRecord& r) {
  nlohmann::json j;
  j["n"] = r.point.n;
  j["d"] = r.point.d;
  j["rho"] = r.point.rho;
  j["rho_sq"] = r.point.rho * r.point.rho;
  j["test"] = std::string(to_string(r.test));
  if (r.count_config) {
    j["count_config"] = {
        {"p_d_rho", r.count_config->p_d_rho},
        {"p_source", r.count_config->source == PSource::monte_carlo ? "monte_carlo" : "quarter_bound"},
        {"samples", r.count_config->samples},
        {"seed", r.count_config->seed}};
  }
  j["estimate"] = r.estimate ? to_json(*r.estimate) : nlohmann::json(nullptr);
  j["bounds"] = r.bounds ? to_json(*r.bounds) : nlohmann::json(nullptr);
  j["error"] = r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.error);
  return j;
}

}  // namespace cordet
