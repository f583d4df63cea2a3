#include "cordet/permutation.hpp"

#include <sstream>
#include <stdexcept>

namespace cordet {

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || seen[v]) {
      throw std::invalid_argument("Permutation: map is not a bijection on {0..n-1}");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < n; ++i) {
    map[i] = i;
  }
  return Permutation(std::move(map));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] != i) {
      return false;
    }
  }
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) {
    inv[map_[i]] = i;
  }
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) {
    throw std::invalid_argument("Permutation::compose: size mismatch");
  }
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[i] = map_[other.map_[i]];
  }
  return Permutation(std::move(out));
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < map_.size(); ++i) {
    os << (i ? " " : "") << map_[i] + 1;
  }
  os << ']';
  return os.str();
}

Permutation Permutation::parse(const std::string& text) {
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',' || c == '[' || c == ']') {
      c = ' ';
    }
  }
  std::istringstream is(cleaned);
  std::vector<std::size_t> map;
  long long v = 0;
  while (is >> v) {
    if (v < 1) {
      throw std::invalid_argument("Permutation::parse: images are 1-based");
    }
    map.push_back(static_cast<std::size_t>(v - 1));
  }
  if (!is.eof()) {
    throw std::invalid_argument("Permutation::parse: unexpected token");
  }
  return Permutation(std::move(map));
}

std::size_t CycleType::weight() const noexcept {
  std::size_t total = 0;
  for (std::size_t k = 1; k <= counts.size(); ++k) {
    total += k * counts[k - 1];
  }
  return total;
}

std::string CycleType::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (std::size_t k = 1; k <= counts.size(); ++k) {
    if (counts[k - 1] != 0) {
      os << (first ? "" : ", ") << "N_" << k << '=' << counts[k - 1];
      first = false;
    }
  }
  os << '}';
  return os.str();
}

CycleType cycle_type(const Permutation& p) {
  const std::size_t n = p.size();
  CycleType type{std::vector<std::size_t>(n, 0)};
  std::vector<bool> visited(n, false);
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) {
      continue;
    }
    std::size_t length = 0;
    for (std::size_t i = start; !visited[i]; i = p[i]) {
      visited[i] = true;
      ++length;
    }
    ++type.counts[length - 1];
  }
  return type;
}

Permutation permutation_with_type(const CycleType& type) {
  if (type.weight() != type.n()) {
    throw std::invalid_argument("permutation_with_type: sum k N_k != n");
  }
  std::vector<std::size_t> map(type.n());
  std::size_t next = 0;
  for (std::size_t k = 1; k <= type.n(); ++k) {
    for (std::size_t c = 0; c < type.count(k); ++c) {
      for (std::size_t j = 0; j < k; ++j) {
        map[next + j] = next + (j + 1) % k;
      }
      next += k;
    }
  }
  return Permutation(std::move(map));
}

}  // namespace cordet
