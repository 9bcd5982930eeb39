// autoconv: synthesis, reconstruction and diagnostics for kernel-based
// complex deautoconvolution.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "autoconv/commands.hpp"
#include "autoconv/config.hpp"

namespace fs = std::filesystem;
using namespace autoconv;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::optional<long long> seed;
  int threads = 0;
};

RunConfig load_config(const Globals& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (g.seed) {
    if (*g.seed < 0) throw ConfigError("--seed: must be >= 0");
    c.noise.seed = static_cast<std::uint64_t>(*g.seed);
  }
  return c;
}

fs::path output_dir(const Globals& g, const RunConfig& c) {
  return g.out.empty() ? c.output : fs::path(g.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-based complex deautoconvolution"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory (overrides the config)");
  app.add_option("--seed", g.seed, "Noise seed (overrides the config)");
  app.add_option("--threads", g.threads, "OpenMP thread count (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);

  auto* synth = app.add_subcommand("synth", "Simulate a measurement directory");

  auto* recon = app.add_subcommand("reconstruct", "Reconstruct x from a measurement directory");
  std::string measurements, replay;
  bool plot = false;
  recon->add_option("--measurements,-m", measurements, "Measurement directory")
      ->check(CLI::ExistingDirectory);
  recon->add_option("--replay-trace", replay,
                    "Replay a recorded trace CSV through the stopping rule instead of solving")
      ->check(CLI::ExistingFile);
  recon->add_flag("--plot-data", plot, "Also write plot_data.csv (series,x,y)");

  auto* demo = app.add_subcommand("demo-illposed", "Tabulate the Psi_beta ill-posedness sequence");

  auto* check = app.add_subcommand("check", "Run the oracle suite");
  std::string check_dir;
  std::size_t check_n = 64;
  bool corrupt = false;
  check->add_option("--measurements,-m", check_dir, "Also validate a measurement directory")
      ->check(CLI::ExistingDirectory);
  check->add_option("--n", check_n, "Grid size for randomized checks")->check(CLI::Range(2, 4096));
  check->add_flag("--corrupt-kernel-entry", corrupt, "Fault injection: perturb one kernel entry");

  CLI11_PARSE(app, argc, argv);
  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    const RunConfig config = load_config(g);
    const fs::path out = output_dir(g, config);

    if (*synth) {
      const MeasurementSet set = cmd_synth(config, out);
      fmt::print("wrote {} (N={}, fine N={}, delta={}%, seed={})\n", out.string(), set.grid.n(),
                 set.fine_points, set.delta_percent, set.seed);
    } else if (*recon) {
      if (!replay.empty()) {
        LMConfig lm = config.solver.lm;
        if (lm.alpha_grid.empty()) lm.alpha_grid = {1.0};
        const auto s = cmd_replay_trace(replay, lm, out);
        fmt::print("l_star={} records={}\n", s["l_star"].get<int>(), s["records"].get<int>());
      } else {
        if (measurements.empty()) throw std::runtime_error("reconstruct: --measurements is required");
        const auto s =
            cmd_reconstruct(measurements, config.solver, out, ReconstructOptions{plot});
        fmt::print("alpha_star={:.6e} alpha_hat_star={:.6g} l_star={}\n",
                   s["alpha_star"].get<double>(), s["alpha_hat_star"].get<double>(),
                   s["l_star"].get<int>());
        if (s.contains("scores"))
          fmt::print("amp_rmse={:.6e} gd_rmse={:.6e} initial_gd_rmse={:.6e}\n",
                     s["scores"]["amp_rmse"].get<double>(), s["scores"]["gd_rmse"].get<double>(),
                     s["scores"]["initial_gd_rmse"].get<double>());
        for (const auto& w : s["warnings"]) fmt::print(stderr, "warning: {}\n", w.get<std::string>());
      }
    } else if (*demo) {
      const auto rows = cmd_demo_illposed(config, out);
      fmt::print("beta,perturbation_norm,image_diff_norm,bound\n");
      for (const auto& r : rows)
        fmt::print("{:.17g},{:.17g},{:.17g},{:.17g}\n", r.beta, r.perturbation_norm,
                   r.image_diff_norm, r.bound);
    } else if (*check) {
      CheckOptions opt;
      opt.n = check_n;
      opt.corrupt_kernel_entry = corrupt;
      if (g.seed) opt.seed = static_cast<std::uint64_t>(*g.seed);
      if (!check_dir.empty()) opt.measurement_dir = check_dir;
      const auto results = cmd_check(opt);
      std::cout << format_report(results);
      const bool ok = all_passed(results);
      fmt::print("{}\n", ok ? "all checks passed" : "some checks FAILED");
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
