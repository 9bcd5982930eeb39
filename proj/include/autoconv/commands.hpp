#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoconv/check.hpp"
#include "autoconv/config.hpp"
#include "autoconv/illposed.hpp"
#include "autoconv/solver.hpp"
#include "autoconv/synth.hpp"

namespace autoconv {

struct LoadedMeasurement {
  MeasurementSet set;
  Kernel kernel;
  bool has_truth = false;
  nlohmann::json meta;
};

/// Writes a_hat.csv, y_delta.csv, truth.csv and meta.json into `dir`.
void save_measurement(const std::filesystem::path& dir, const MeasurementSet& set,
                      const RunConfig& config);
LoadedMeasurement load_measurement(const std::filesystem::path& dir);

MeasurementSet cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir);

struct ReconstructOptions {
  bool plot_data = false;
};

/// Runs the alpha sweep and writes reconstruction.csv, trace_<alpha>.csv and
/// summary.json. Returns the summary document.
nlohmann::json cmd_reconstruct(const std::filesystem::path& measurement_dir,
                               const SolverSettings& solver, const std::filesystem::path& out_dir,
                               const ReconstructOptions& options = {});

/// Replays a recorded trace CSV through the stopping rule and writes
/// summary.json with the resulting l_star.
nlohmann::json cmd_replay_trace(const std::filesystem::path& trace_csv, const LMConfig& config,
                                const std::filesystem::path& out_dir);

/// Writes illposedness.csv and demo_summary.json; returns the table rows.
std::vector<IllposednessRow> cmd_demo_illposed(const RunConfig& config,
                                               const std::filesystem::path& out_dir);

std::vector<CheckResult> cmd_check(const CheckOptions& options);

/// File name used for the trace of one alpha value.
std::string trace_file_name(double alpha);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace autoconv
