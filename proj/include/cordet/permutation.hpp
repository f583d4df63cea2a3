#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace cordet {

/// Element of S_n stored as its image array: map[i] = sigma(i), 0-based.
class Permutation {
 public:
  Permutation() = default;

  /// Throws std::invalid_argument unless `map` is a bijection on {0..n-1}.
  explicit Permutation(std::vector<std::size_t> map);

  static Permutation identity(std::size_t n);

  /// Uniform draw by Fisher-Yates.
  template <typename Engine>
  static Permutation uniform(std::size_t n, Engine& engine) {
    std::vector<std::size_t> map(n);
    for (std::size_t i = 0; i < n; ++i) {
      map[i] = i;
    }
    for (std::size_t i = n; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(map[i - 1], map[pick(engine)]);
    }
    Permutation p;
    p.map_ = std::move(map);
    return p;
  }

  [[nodiscard]] std::size_t size() const noexcept { return map_.size(); }
  [[nodiscard]] std::size_t operator[](std::size_t i) const { return map_[i]; }
  [[nodiscard]] const std::vector<std::size_t>& map() const noexcept { return map_; }
  [[nodiscard]] bool is_identity() const noexcept;

  [[nodiscard]] Permutation inverse() const;

  /// (this * other)(i) = this(other(i)).
  [[nodiscard]] Permutation compose(const Permutation& other) const;

  /// One-line image notation, 1-based: "[2 1 3]".
  [[nodiscard]] std::string to_string() const;

  /// Parses whitespace/comma separated 1-based images, e.g. "2 1 3".
  static Permutation parse(const std::string& text);

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> map_;
};

/// Cycle-count vector: counts[k-1] = N_k, the number of k-cycles.
struct CycleType {
  std::vector<std::size_t> counts;

  [[nodiscard]] std::size_t n() const noexcept { return counts.size(); }
  /// N_k for 1 <= k <= n; zero outside that range.
  [[nodiscard]] std::size_t count(std::size_t k) const noexcept {
    return (k >= 1 && k <= counts.size()) ? counts[k - 1] : 0;
  }
  /// sum_k k N_k; equals n for every valid type.
  [[nodiscard]] std::size_t weight() const noexcept;
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const CycleType&, const CycleType&) = default;
};

/// Cycle decomposition by visited-mark traversal.
CycleType cycle_type(const Permutation& p);

/// Canonical permutation with the given cycle type (cycles laid out on
/// consecutive indices, shortest first).
Permutation permutation_with_type(const CycleType& type);

}  // namespace cordet
