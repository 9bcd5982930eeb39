#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "autoconv/illposed.hpp"
#include "autoconv/signal.hpp"
#include "autoconv/solver.hpp"

namespace autoconv::csv {

/// Round-trip decimal formatting used by every table.
std::string format_number(double v);

/// Header "node,re,im,amplitude,phase"; phase is unwrapped.
void write_signal(const std::filesystem::path& path, const ComplexSignal& x);
ComplexSignal read_signal(const std::filesystem::path& path);

/// Header "node,re,im,amplitude,phase,group_delay".
void write_reconstruction(const std::filesystem::path& path, const ComplexSignal& x,
                          std::span<const double> group_delay);

/// Header "iteration,residual,smoothness,amplitude_deviation".
void write_trace(const std::filesystem::path& path, const IterationTrace& trace);
IterationTrace read_trace(const std::filesystem::path& path);

/// Header "beta,perturbation_norm,image_diff_norm,bound".
void write_illposedness(const std::filesystem::path& path, std::span<const IllposednessRow> rows);

struct PlotPoint {
  std::string series;
  double x;
  double y;
};

/// Long-format "series,x,y" table for external plotting.
void write_plot_data(const std::filesystem::path& path, std::span<const PlotPoint> points);

/// Splits one CSV line on commas (no quoting; all tables here are numeric).
std::vector<std::string> split_line(const std::string& line);

}  // namespace autoconv::csv
