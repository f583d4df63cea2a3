#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cordet {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::size_t n_max = 7;
  std::optional<std::size_t> k;
  std::optional<std::size_t> d;
  std::optional<double> rho;
  std::size_t trials = 0;  // 0: per-suite default
  std::uint64_t seed = 20240601;
  unsigned threads = 0;
};

/// perms, lemma-cycle, overlap, bounds, poisson, assignment.
const std::vector<std::string>& verify_suite_names();

/// Runs one named suite, or every suite for "all". Throws
/// std::invalid_argument for an unknown name or inconsistent options.
std::vector<CheckResult> run_verify(std::string_view suite, const VerifyOptions& options);

}  // namespace cordet
