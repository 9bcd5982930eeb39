#include "autoconv/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "autoconv/csv.hpp"
#include "autoconv/forward.hpp"

namespace autoconv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw std::runtime_error(fmt::format("cannot create output directory {}: {}", dir.string(),
                                         ec ? ec.message() : "not a directory"));
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_json_text(text, path.string());
}

// Samples of a signal file checked against the expected axis.
std::vector<cplx> read_on_axis(const fs::path& path, const Axis& axis) {
  const ComplexSignal s = csv::read_signal(path);
  if (s.size() != axis.size)
    throw std::runtime_error(
        fmt::format("{}: expected {} rows, found {}", path.string(), axis.size, s.size()));
  const double tol = 1e-9 * std::max(std::abs(axis.step) * static_cast<double>(axis.size),
                                     std::abs(axis.start));
  if (std::abs(s.axis.start - axis.start) > tol || std::abs(s.axis.last() - axis.last()) > tol)
    throw std::runtime_error(path.string() + ": node column does not match the grid in meta.json");
  return s.values;
}

}  // namespace

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string trace_file_name(double alpha) { return fmt::format("trace_{:.6e}.csv", alpha); }

void save_measurement(const fs::path& dir, const MeasurementSet& set, const RunConfig& config) {
  ensure_dir(dir);
  std::vector<cplx> a(set.a_hat.begin(), set.a_hat.end());
  csv::write_signal(dir / "a_hat.csv", ComplexSignal(set.grid.input_axis(), std::move(a)));
  csv::write_signal(dir / "y_delta.csv", set.y_delta);
  csv::write_signal(dir / "truth.csv", set.ground_truth);
  const json meta{
      {"delta_percent", set.delta_percent},
      {"seed", set.seed},
      {"generator", set.generator},
      {"grid", to_json(set.grid)},
      {"fine_grid",
       {{"N", set.fine_points},
        {"shared_nodes", shared_node_count(set.grid.n(), set.fine_points)},
        {"fine_factor", {{"num", config.fine_factor.num}, {"den", config.fine_factor.den}}}}},
      {"kernel", to_json(config.kernel)},
      {"pulse", to_json(config.pulse)}};
  write_json(dir / "meta.json", meta);
}

LoadedMeasurement load_measurement(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + ": not a directory");
  json meta = read_json(dir / "meta.json");
  const json& g = meta.at("grid");
  const SampledGrid grid(g.at("q_min").get<double>(), g.at("q_max").get<double>(),
                         g.at("N").get<std::size_t>(), g.at("q_cw").get<double>());
  Kernel kernel = parse_kernel(meta.at("kernel"), "meta.kernel");

  const auto a = read_on_axis(dir / "a_hat.csv", grid.input_axis());
  std::vector<double> a_hat(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) a_hat[i] = a[i].real();
  ComplexSignal y(grid.output_axis(), read_on_axis(dir / "y_delta.csv", grid.output_axis()));

  const bool has_truth = fs::exists(dir / "truth.csv");
  ComplexSignal truth(grid.input_axis(),
                      has_truth ? read_on_axis(dir / "truth.csv", grid.input_axis())
                                : std::vector<cplx>(grid.n()));
  const std::size_t fine_n =
      meta.contains("fine_grid") ? meta["fine_grid"].value("N", std::size_t{0}) : std::size_t{0};
  MeasurementSet set{grid,
                     std::move(a_hat),
                     std::move(y),
                     std::move(truth),
                     meta.value("delta_percent", 0.0),
                     meta.value("seed", std::uint64_t{0}),
                     fine_n,
                     meta.value("generator", std::string{})};
  return {std::move(set), std::move(kernel), has_truth, std::move(meta)};
}

MeasurementSet cmd_synth(const RunConfig& config, const fs::path& out_dir) {
  const MeasurementSet set = simulate_measurement(config.pulse, config.kernel, config.grid.make(),
                                                  config.noise, config.fine_factor);
  save_measurement(out_dir, set, config);
  return set;
}

json cmd_reconstruct(const fs::path& measurement_dir, const SolverSettings& solver,
                     const fs::path& out_dir, const ReconstructOptions& options) {
  const LoadedMeasurement m = load_measurement(measurement_dir);
  const SampledGrid& grid = m.set.grid;
  const double dq = grid.dq();
  const double kernel_scale = solver.kernel_scale.value_or(m.kernel.nominal_scale());
  const double a_max = *std::max_element(m.set.a_hat.begin(), m.set.a_hat.end());
  const LMConfig lm = resolve_solver(solver, a_max, dq, kernel_scale);

  const InverseProblem problem(grid, m.kernel, m.set.y_delta.values, m.set.a_hat);
  const ReconstructionResult r = select_alpha(problem, lm);

  auto alpha_hat = [&](double a) { return normalized_alpha(a, a_max, dq, kernel_scale); };

  std::set<std::string> names;
  for (double a : lm.alpha_grid)
    if (!names.insert(trace_file_name(a)).second)
      throw std::runtime_error(fmt::format("alpha grid values too close for distinct trace files "
                                           "({})", trace_file_name(a)));

  json per_alpha = json::array();
  for (double a : lm.alpha_grid) {
    json e{{"alpha", a}, {"alpha_hat", alpha_hat(a)}};
    if (r.traces.count(a)) {
      e["l_star"] = r.stop_indices.at(a);
      e["deviation"] = r.deviations_at_stop.at(a);
      e["turning_point"] = r.turning_points.at(a);
      e["iterations"] = r.traces.at(a).size();
      e["trace_file"] = trace_file_name(a);
    } else {
      e["failed"] = true;
    }
    per_alpha.push_back(e);
  }

  json summary{{"alpha_star", r.alpha_star},
               {"alpha_hat_star", alpha_hat(r.alpha_star)},
               {"l_star", r.l_star},
               {"kernel_scale", kernel_scale},
               {"a_hat_max", a_max},
               {"dq", dq},
               {"per_alpha", per_alpha},
               {"warnings", r.warnings},
               {"measurement", m.meta},
               {"config", {{"solver", to_json(solver)}, {"resolved", to_json(lm)}}}};

  if (m.has_truth) {
    const ReconstructionError e =
        reconstruction_error(r.x_reconstructed, m.set.ground_truth, solver.central_fraction);
    std::vector<cplx> x0(m.set.a_hat.begin(), m.set.a_hat.end());
    const ReconstructionError e0 = reconstruction_error(ComplexSignal(grid.input_axis(), x0),
                                                        m.set.ground_truth, solver.central_fraction);
    summary["scores"] = {{"central_fraction", solver.central_fraction},
                         {"amp_rmse", e.amp_rmse},
                         {"gd_rmse", e.gd_rmse},
                         {"initial_amp_rmse", e0.amp_rmse},
                         {"initial_gd_rmse", e0.gd_rmse}};
  }

  ensure_dir(out_dir);
  csv::write_reconstruction(out_dir / "reconstruction.csv", r.x_reconstructed, r.group_delay);
  for (const auto& [a, trace] : r.traces) csv::write_trace(out_dir / trace_file_name(a), trace);
  write_json(out_dir / "summary.json", summary);

  if (options.plot_data) {
    std::vector<csv::PlotPoint> pts;
    const auto amp = abs_values(r.x_reconstructed.view());
    for (std::size_t i = 0; i < grid.n(); ++i) {
      const double q = grid.input_node(i);
      pts.push_back({"amplitude", q, amp[i]});
      pts.push_back({"a_hat", q, m.set.a_hat[i]});
      pts.push_back({"group_delay", q, r.group_delay[i]});
    }
    if (m.has_truth) {
      const auto gd_true = group_delay(m.set.ground_truth);
      for (std::size_t i = 0; i < grid.n(); ++i)
        pts.push_back({"group_delay_truth", grid.input_node(i), gd_true[i]});
    }
    for (const auto& [a, d] : r.deviations_at_stop) pts.push_back({"deviation_vs_alpha_hat", alpha_hat(a), d});
    for (const auto& rec : r.traces.at(r.alpha_star).records)
      pts.push_back({"amplitude_deviation", static_cast<double>(rec.iteration),
                     rec.amplitude_deviation});
    csv::write_plot_data(out_dir / "plot_data.csv", pts);
  }
  return summary;
}

json cmd_replay_trace(const fs::path& trace_csv, const LMConfig& config, const fs::path& out_dir) {
  const IterationTrace trace = csv::read_trace(trace_csv);
  const TurningPoint tp = find_turning_point(trace, config.patience, config.min_iterations);
  const auto best = std::find_if(trace.records.begin(), trace.records.end(),
                                 [&](const auto& rec) { return rec.iteration == tp.l_star; });
  json summary{{"replayed_trace", trace_csv.string()},
               {"records", trace.size()},
               {"l_star", tp.l_star},
               {"deviation_at_l_star", best->amplitude_deviation},
               {"turning_point", tp.observed},
               {"stopped_early", tp.stopped_early},
               {"patience", config.patience},
               {"min_iterations", config.min_iterations}};
  ensure_dir(out_dir);
  write_json(out_dir / "summary.json", summary);
  return summary;
}

std::vector<IllposednessRow> cmd_demo_illposed(const RunConfig& config, const fs::path& out_dir) {
  const DemoSettings& d = config.demo;
  const SampledGrid grid(0.0, 1.0, d.n, 0.0);
  const ComplexSignal pulse = make_pulse(config.pulse, grid);
  const ComplexSignal x0 =
      d.x0 == "pulse" ? pulse : ComplexSignal(grid.input_axis(), std::vector<cplx>(grid.n()));
  const auto rows = illposedness_demo(x0, d.r, d.betas, d.kernel, grid);

  const KernelMatrix k = kernel_matrix(d.kernel, grid);
  json closed_form = json::array();
  for (double beta : d.betas) {
    const PsiBetaSpec spec{d.r, beta};
    const ComplexSignal psi = psi_beta_samples(spec, grid);
    const auto conv = apply_forward(k, psi.view(), grid.dq());
    for (double s : {0.5, 1.0, 1.5}) {
      const auto m = static_cast<std::size_t>(std::llround(s / grid.dq()));
      const double exact = psi_beta_autoconv_closed_form(spec, s);
      const double discrete = std::abs(conv[m]);
      closed_form.push_back({{"beta", beta},
                             {"s", s},
                             {"discrete", discrete},
                             {"closed_form", exact},
                             {"relative_error", (discrete - exact) / exact}});
    }
  }

  const auto y = apply_forward(d.kernel, pulse, grid);
  const SignResiduals sr = sign_ambiguity_residual(pulse, y, d.kernel, grid);

  ensure_dir(out_dir);
  csv::write_illposedness(out_dir / "illposedness.csv", rows);
  write_json(out_dir / "demo_summary.json",
             {{"config", to_json(d)},
              {"closed_form_comparison", closed_form},
              {"sign_ambiguity", {{"residual_plus", sr.plus}, {"residual_minus", sr.minus}}}});
  return rows;
}

std::vector<CheckResult> cmd_check(const CheckOptions& options) { return run_checks(options); }

}  // namespace autoconv
