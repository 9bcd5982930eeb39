#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace autoconv {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured error
  double tolerance = 0.0;  // pass when value <= tolerance
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  std::size_t n = 64;
  std::uint64_t seed = 20240607;
  /// Test hook: perturbs one entry of the precomputed kernel table used by
  /// the fast forward path, so the forward oracle must flag it.
  bool corrupt_kernel_entry = false;
  std::optional<std::filesystem::path> measurement_dir;
};

/// Oracle suite: forward map vs brute force, matrix forms, derivative vs
/// finite differences, sign ambiguity and polar round trips. Measurement
/// checks are added when a directory is given.
std::vector<CheckResult> run_checks(const CheckOptions& options);

bool all_passed(const std::vector<CheckResult>& results);

/// One line per check: "PASS|FAIL <name> value=<v> tol=<t> [detail]".
std::string format_report(const std::vector<CheckResult>& results);

}  // namespace autoconv
