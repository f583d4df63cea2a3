#include "cordet/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "cordet/montecarlo.hpp"
#include "cordet/parallel.hpp"

namespace cordet {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kCfEpsilon = 1e-16;
constexpr int kCfMaxIterations = 10000;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) {
    d = kTiny;
  }
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIterations; ++m) {
    const double mm = m;
    const double m2 = 2.0 * mm;
    double aa = mm * (b - mm) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + mm) * (qab + mm) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kCfEpsilon) {
      return h;
    }
  }
  throw std::runtime_error("incomplete_beta: continued fraction failed to converge");
}

void check_dimension(std::size_t d, const char* where) {
  if (d < 2) {
    throw std::invalid_argument(std::string(where) + ": requires d >= 2");
  }
}

void check_open_unit(double rho, const char* where) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument(std::string(where) + ": requires rho in (0, 1)");
  }
}

double binomial_std_error(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

double incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("incomplete_beta: a and b must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("incomplete_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (y == 0.0) {
    return 1.0;
  }
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

double incomplete_beta(double a, double b, double x) { return incomplete_beta(a, b, x, 1.0 - x); }

OverlapProb q_exact(std::size_t d, double rho) {
  check_dimension(d, "q_exact");
  OverlapProb out;
  out.method = OverlapMethod::exact_beta;
  if (rho >= 1.0) {
    out.value = 0.0;
    return out;
  }
  if (rho <= -1.0) {
    out.value = 1.0;
    return out;
  }
  // P(T >= r) = 0.5 * P(T^2 >= r^2) = 0.5 * I_{1-r^2}((d-1)/2, 1/2) for r >= 0.
  const double r = std::abs(rho);
  const double upper = 0.5 * incomplete_beta(0.5 * static_cast<double>(d - 1), 0.5,
                                             (1.0 - r) * (1.0 + r), r * r);
  out.value = rho >= 0.0 ? upper : 1.0 - upper;
  return out;
}

bool overlap_at_least(double dot, double xx, double yy, double rho) noexcept {
  const double signed_dot = rho < 0.0 ? -dot : dot;
  if (signed_dot < 0.0) {
    return false;
  }
  return signed_dot * signed_dot >= (rho * rho * xx) * yy;
}

OverlapProb p_mc(std::size_t d, double rho, std::size_t samples, const RngStream& rng,
                 unsigned threads) {
  if (d == 0 || samples == 0) {
    throw std::invalid_argument("p_mc: d and samples must be positive");
  }
  if (!(std::abs(rho) <= 1.0)) {
    throw std::invalid_argument("p_mc: requires |rho| <= 1");
  }
  const double noise = std::sqrt((1.0 - rho) * (1.0 + rho));
  const auto hits = monte_carlo_count(samples, rng, threads, [&](Philox4x32& engine) {
    std::normal_distribution<double> normal;
    double xx = 0.0;
    double yy = 0.0;
    double dot = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double x = normal(engine);
      const double y = rho * x + noise * normal(engine);
      xx += x * x;
      yy += y * y;
      dot += x * y;
    }
    return overlap_at_least(dot, xx, yy, rho);
  });
  OverlapProb out;
  out.method = OverlapMethod::monte_carlo;
  out.samples = samples;
  out.value = static_cast<double>(hits) / static_cast<double>(samples);
  out.std_error = binomial_std_error(out.value, samples);
  return out;
}

std::vector<OverlapProb> q_sphere_mc(std::size_t d, std::span<const double> rhos,
                                     std::size_t samples, const RngStream& rng,
                                     unsigned threads) {
  if (d == 0 || samples == 0) {
    throw std::invalid_argument("q_sphere_mc: d and samples must be positive");
  }
  const std::size_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<std::vector<std::uint64_t>> partial(chunks,
                                                  std::vector<std::uint64_t>(rhos.size(), 0));
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto engine = rng.child(c).engine();
    std::normal_distribution<double> normal;
    std::vector<double> x(d);
    std::vector<double> y(d);
    const std::size_t begin = c * kMonteCarloChunk;
    const std::size_t end = std::min(samples, begin + kMonteCarloChunk);
    for (std::size_t t = begin; t < end; ++t) {
      double xx = 0.0;
      double yy = 0.0;
      double dot = 0.0;
      for (auto& v : x) {
        v = normal(engine);
        xx += v * v;
      }
      for (std::size_t j = 0; j < d; ++j) {
        y[j] = normal(engine);
        yy += y[j] * y[j];
        dot += x[j] * y[j];
      }
      const double overlap = dot / std::sqrt(xx * yy);
      for (std::size_t r = 0; r < rhos.size(); ++r) {
        partial[c][r] += overlap >= rhos[r] ? 1 : 0;
      }
    }
  });
  std::vector<OverlapProb> out(rhos.size());
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    std::uint64_t hits = 0;
    for (const auto& chunk : partial) {
      hits += chunk[r];
    }
    out[r].method = OverlapMethod::monte_carlo;
    out[r].samples = samples;
    out[r].value = static_cast<double>(hits) / static_cast<double>(samples);
    out[r].std_error = binomial_std_error(out[r].value, samples);
  }
  return out;
}

double log_cap_volume_upper(std::size_t d, double rho) {
  check_dimension(d, "cap_volume_upper");
  check_open_unit(rho, "cap_volume_upper");
  const double dm1 = static_cast<double>(d - 1);
  const double one_minus = (1.0 - rho) * (1.0 + rho);
  return std::log(2.0) +
         0.5 * dm1 * std::log(2.0 * std::numbers::pi * std::numbers::e * one_minus / dm1) -
         dm1 * std::log(rho);
}

double cap_volume_upper(std::size_t d, double rho) { return std::exp(log_cap_volume_upper(d, rho)); }

SphereArea sphere_volume_lower(std::size_t d) {
  check_dimension(d, "sphere_volume_lower");
  const double dd = static_cast<double>(d);
  SphereArea out;
  out.lower_bound = (4.0 / dd) * std::exp(0.5 * dd * std::log(2.0 * std::numbers::pi / dd));
  out.exact =
      std::exp(std::log(2.0) + 0.5 * dd * std::log(std::numbers::pi) - std::lgamma(0.5 * dd));
  return out;
}

double log_count_prefactor(std::size_t d) {
  check_dimension(d, "count_prefactor");
  const double dd = static_cast<double>(d);
  const double dm1 = dd - 1.0;
  return std::log(0.5 * dd) + 0.5 * dd * std::log(std::numbers::e * dd / dm1) +
         0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e / dm1);
}

double count_prefactor(std::size_t d) { return std::exp(log_count_prefactor(d)); }

double q_upper_bound(std::size_t d, double rho) {
  check_dimension(d, "q_upper_bound");
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("q_upper_bound: requires rho in (0, 1]");
  }
  const double dm1 = static_cast<double>(d - 1);
  const double log_bound =
      log_count_prefactor(d) + 0.5 * dm1 * std::log1p(-rho * rho) - dm1 * std::log(rho);
  return std::exp(log_bound);
}

}  // namespace cordet
