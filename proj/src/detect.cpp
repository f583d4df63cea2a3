#include "cordet/detect.hpp"

#include <bit>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <tuple>

#include "cordet/numerics.hpp"

namespace cordet {

namespace {

using CacheKey = std::tuple<std::size_t, std::uint64_t, std::size_t, std::uint64_t>;

struct PCache {
  std::shared_mutex mutex;
  std::map<CacheKey, double> values;
};

PCache& p_cache() {
  static PCache cache;
  return cache;
}

}  // namespace

CountTestConfig CountTestConfig::quarter_bound() {
  CountTestConfig cfg;
  cfg.p_d_rho = 0.25;
  cfg.source = PSource::quarter_bound;
  return cfg;
}

CountTestConfig CountTestConfig::monte_carlo(std::size_t d, double rho, std::size_t samples,
                                             std::uint64_t seed) {
  if (samples == 0) {
    throw std::invalid_argument("CountTestConfig: samples must be positive");
  }
  const CacheKey key{d, std::bit_cast<std::uint64_t>(rho), samples, seed};
  auto& cache = p_cache();
  double value = 0.0;
  bool found = false;
  {
    std::shared_lock lock(cache.mutex);
    if (auto it = cache.values.find(key); it != cache.values.end()) {
      value = it->second;
      found = true;
    }
  }
  if (!found) {
    // Deterministic in the key, so a lost race inserts the same number.
    const double estimate = p_mc(d, rho, samples, RngStream{seed, 0}, 1).value;
    std::unique_lock lock(cache.mutex);
    value = cache.values.try_emplace(key, estimate).first->second;
  }
  if (!(value > 0.0)) {
    throw std::runtime_error("CountTestConfig: Monte Carlo estimate of P_{d,rho} is zero");
  }
  CountTestConfig cfg;
  cfg.p_d_rho = value;
  cfg.source = PSource::monte_carlo;
  cfg.samples = samples;
  cfg.seed = seed;
  return cfg;
}

std::size_t p_cache_size() {
  auto& cache = p_cache();
  std::shared_lock lock(cache.mutex);
  return cache.values.size();
}

std::string_view to_string(TestKind kind) noexcept {
  switch (kind) {
    case TestKind::sum:
      return "sum";
    case TestKind::count:
      return "count";
    case TestKind::max:
      return "max";
  }
  return "unknown";
}

TestKind parse_test_kind(std::string_view name) {
  if (name == "sum") {
    return TestKind::sum;
  }
  if (name == "count") {
    return TestKind::count;
  }
  if (name == "max") {
    return TestKind::max;
  }
  throw std::invalid_argument("unknown test '" + std::string(name) +
                              "' (expected sum, count or max)");
}

}  // namespace cordet
