#include "autoconv/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace autoconv::csv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

double parse_double(const std::string& field, const std::filesystem::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(
        fmt::format("{}:{}: cannot parse number '{}'", path.string(), line, field));
  }
}

// Reads a numeric table whose header must match `expected_header` exactly.
std::vector<std::vector<double>> read_table(const std::filesystem::path& path,
                                            const std::string& expected_header) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header)
    throw std::runtime_error(fmt::format("{}:1: expected header '{}', got '{}'", path.string(),
                                         expected_header, line));
  const std::size_t columns = split_line(expected_header).size();
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != columns)
      throw std::runtime_error(fmt::format("{}:{}: expected {} columns, got {}", path.string(),
                                           lineno, columns, fields.size()));
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_double(f, path, lineno));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_signal(const std::filesystem::path& path, const ComplexSignal& x) {
  auto out = open_out(path);
  const PolarSignal p = to_polar(x);
  out << "node,re,im,amplitude,phase\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", x.axis.node(i),
                       x.values[i].real(), x.values[i].imag(), p.amplitude[i], p.phase[i]);
}

ComplexSignal read_signal(const std::filesystem::path& path) {
  const auto rows = read_table(path, "node,re,im,amplitude,phase");
  if (rows.size() < 2) throw std::runtime_error(path.string() + ": need at least 2 samples");
  const double start = rows.front()[0];
  const double step = (rows.back()[0] - start) / static_cast<double>(rows.size() - 1);
  std::vector<cplx> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.emplace_back(r[1], r[2]);
  return {Axis{start, step, rows.size()}, std::move(v)};
}

void write_reconstruction(const std::filesystem::path& path, const ComplexSignal& x,
                          std::span<const double> group_delay) {
  if (group_delay.size() != x.size())
    throw std::invalid_argument("group delay length does not match the signal");
  auto out = open_out(path);
  const PolarSignal p = to_polar(x);
  out << "node,re,im,amplitude,phase,group_delay\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", x.axis.node(i),
                       x.values[i].real(), x.values[i].imag(), p.amplitude[i], p.phase[i],
                       group_delay[i]);
}

void write_trace(const std::filesystem::path& path, const IterationTrace& trace) {
  auto out = open_out(path);
  out << "iteration,residual,smoothness,amplitude_deviation\n";
  for (const auto& r : trace.records)
    out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", r.iteration, r.residual, r.smoothness,
                       r.amplitude_deviation);
}

IterationTrace read_trace(const std::filesystem::path& path) {
  const auto rows = read_table(path, "iteration,residual,smoothness,amplitude_deviation");
  IterationTrace trace;
  for (const auto& r : rows)
    trace.push({static_cast<int>(std::lround(r[0])), r[1], r[2], r[3]});
  return trace;
}

void write_illposedness(const std::filesystem::path& path, std::span<const IllposednessRow> rows) {
  auto out = open_out(path);
  out << "beta,perturbation_norm,image_diff_norm,bound\n";
  for (const auto& r : rows)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", r.beta, r.perturbation_norm,
                       r.image_diff_norm, r.bound);
}

void write_plot_data(const std::filesystem::path& path, std::span<const PlotPoint> points) {
  auto out = open_out(path);
  out << "series,x,y\n";
  for (const auto& p : points) out << fmt::format("{},{:.17g},{:.17g}\n", p.series, p.x, p.y);
}

}  // namespace autoconv::csv
