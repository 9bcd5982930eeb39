#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoconv/kernel.hpp"
#include "autoconv/signal.hpp"
#include "autoconv/solver.hpp"
#include "autoconv/synth.hpp"

namespace autoconv {

/// Invalid configuration. The message starts with the offending field path
/// (e.g. "solver.alpha_grid[2]") or with "line N" for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSettings {
  double q_min = 2.0e15;
  double q_max = 2.6e15;
  std::size_t n = 128;
  double q_cw = 0.0;

  SampledGrid make() const { return SampledGrid(q_min, q_max, n, q_cw); }
};

/// Physical kernel used when a config does not give one, matched to the
/// default grid so that normalized alpha values are of order one.
PhysicalKernelParams reference_kernel_params();

struct SolverSettings {
  /// Raw alpha values. When empty, alpha_hat_grid is denormalized against
  /// the measurement (A_hat max, dq, kernel_scale).
  LMConfig lm;
  std::vector<double> alpha_hat_grid;
  std::optional<double> kernel_scale;  // defaults to the kernel's nominal scale
  double central_fraction = 0.6;
};

/// 10 log-spaced values over [1e-2, 1e4].
std::vector<double> default_alpha_hat_grid();

std::vector<double> logspace(double lo_exp, double hi_exp, std::size_t count);

/// LMConfig with a concrete alpha grid for the given measurement.
LMConfig resolve_solver(const SolverSettings& s, double a_hat_max, double dq, double kernel_scale);

struct DemoSettings {
  double r = 1.0;
  std::vector<double> betas{0.30, 0.40, 0.45, 0.49};
  std::size_t n = 2001;
  /// "zero" or "pulse" (the configured pulse sampled on [0, 1]).
  std::string x0 = "zero";
  Kernel kernel = Kernel::constant({1.0, 0.0});
};

struct RunConfig {
  GridSettings grid;
  Kernel kernel = Kernel::physical(reference_kernel_params());
  PulseSpec pulse;
  NoiseSpec noise;
  FineFactor fine_factor;
  SolverSettings solver;
  DemoSettings demo;
  std::filesystem::path output = "out";
};

RunConfig parse_run_config(const nlohmann::json& j);
/// Reads a JSON file; syntax errors are reported with line numbers.
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

Kernel parse_kernel(const nlohmann::json& j, const std::string& path = "kernel");
LMConfig parse_lm_config(const nlohmann::json& j, const std::string& path = "solver");

nlohmann::json to_json(const GridSettings& g);
nlohmann::json to_json(const SampledGrid& g);
nlohmann::json to_json(const Kernel& k);
nlohmann::json to_json(const PulseSpec& p);
nlohmann::json to_json(const NoiseSpec& n);
nlohmann::json to_json(const LMConfig& c);
nlohmann::json to_json(const SolverSettings& s);
nlohmann::json to_json(const DemoSettings& d);
nlohmann::json to_json(const RunConfig& c);

}  // namespace autoconv
