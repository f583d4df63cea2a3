#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cordet/parallel.hpp"
#include "cordet/rng.hpp"

namespace cordet {

/// Sample mean with its standard error.
struct MeanEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Trials per reproducibility chunk. Chunk c always draws from
/// `rng.child(c)`, whatever the worker count.
inline constexpr std::size_t kMonteCarloChunk = 1u << 14;

namespace detail {

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) noexcept {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  // Chan et al. pairwise combination.
  void merge(const Moments& other) noexcept {
    if (other.count == 0) {
      return;
    }
    if (count == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(count + other.count);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.count) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(count) *
                         static_cast<double>(other.count) / total;
    count += other.count;
  }
};

inline std::size_t chunk_count(std::size_t trials) {
  return (trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
}

}  // namespace detail

/// Mean and standard error of `draw(engine)` over `trials` draws.
template <typename Draw>
MeanEstimate monte_carlo_mean(std::size_t trials, const RngStream& rng, unsigned threads,
                              Draw&& draw) {
  if (trials == 0) {
    throw std::invalid_argument("monte_carlo_mean: trials must be >= 1");
  }
  const std::size_t chunks = detail::chunk_count(trials);
  std::vector<detail::Moments> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto engine = rng.child(c).engine();
    const std::size_t begin = c * kMonteCarloChunk;
    const std::size_t end = std::min(trials, begin + kMonteCarloChunk);
    detail::Moments local;
    for (std::size_t t = begin; t < end; ++t) {
      local.push(draw(engine));
    }
    partial[c] = local;
  });

  detail::Moments total;
  for (const auto& m : partial) {
    total.merge(m);
  }
  MeanEstimate out;
  out.estimate = total.mean;
  out.trials = trials;
  if (trials > 1) {
    const double var = total.m2 / static_cast<double>(trials - 1);
    out.std_error = std::sqrt(var / static_cast<double>(trials));
  }
  return out;
}

/// Number of trials for which `event(engine)` is true.
template <typename Event>
std::uint64_t monte_carlo_count(std::size_t trials, const RngStream& rng, unsigned threads,
                                Event&& event) {
  const std::size_t chunks = detail::chunk_count(trials);
  std::vector<std::uint64_t> partial(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto engine = rng.child(c).engine();
    const std::size_t begin = c * kMonteCarloChunk;
    const std::size_t end = std::min(trials, begin + kMonteCarloChunk);
    std::uint64_t hits = 0;
    for (std::size_t t = begin; t < end; ++t) {
      hits += event(engine) ? 1 : 0;
    }
    partial[c] = hits;
  });
  std::uint64_t total = 0;
  for (auto h : partial) {
    total += h;
  }
  return total;
}

}  // namespace cordet
