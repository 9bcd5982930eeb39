#include "autoconv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "autoconv/forward.hpp"

namespace autoconv {

void PulseSpec::validate() const {
  if (!(amplitude_max > 0.0)) throw std::invalid_argument("pulse amplitude_max must be > 0");
  if (shape == PulseShape::SmoothSinglePeak) {
    if (!(width > 0.0)) throw std::invalid_argument("pulse width must be > 0");
    if (!(phase_half_width > 0.0)) throw std::invalid_argument("phase_half_width must be > 0");
  } else {
    if (!(width1 > 0.0) || !(width2 > 0.0))
      throw std::invalid_argument("pulse peak widths must be > 0");
    if (!(second_peak_ratio >= 0.0))
      throw std::invalid_argument("second_peak_ratio must be >= 0");
  }
}

ComplexSignal make_pulse(const PulseSpec& spec, const SampledGrid& grid) {
  spec.validate();
  const std::size_t n = grid.n();
  auto gauss = [](double u, double c, double w) {
    const double t = (u - c) / w;
    return std::exp(-t * t);
  };

  std::vector<double> amp(n), phase(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Relative position from the node index keeps the midpoint exact.
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    if (spec.shape == PulseShape::SmoothSinglePeak) {
      amp[i] = gauss(u, spec.center, spec.width);
      const double t = (u - 0.5) / spec.phase_half_width;
      phase[i] = std::clamp(std::numbers::pi * t * t * t, -std::numbers::pi, std::numbers::pi);
    } else {
      amp[i] = gauss(u, spec.center1, spec.width1) +
               spec.second_peak_ratio * gauss(u, spec.center2, spec.width2);
      phase[i] = spec.phase_amplitude * std::sin(2.0 * std::numbers::pi * spec.phase_frequency * u);
    }
  }
  const double peak = *std::max_element(amp.begin(), amp.end());
  if (!(peak > 0.0)) throw std::invalid_argument("pulse amplitude vanishes on the grid");

  std::vector<cplx> values(n);
  for (std::size_t i = 0; i < n; ++i)
    values[i] = std::polar(spec.amplitude_max * (amp[i] / peak), phase[i]);
  return {grid.input_axis(), std::move(values)};
}

std::size_t fine_point_count(std::size_t n, FineFactor factor) {
  if (n < 2) throw std::invalid_argument("coarse grid needs at least 2 points");
  if (factor.num <= 0 || factor.den <= 0)
    throw std::invalid_argument("fine factor must be a positive ratio");
  const auto coarse_cells = static_cast<long long>(n - 1);
  auto fine_cells = static_cast<long long>(
      std::llround(static_cast<double>(factor.num) / factor.den * static_cast<double>(coarse_cells)));
  if (fine_cells < 1 || fine_cells % coarse_cells == 0 || coarse_cells % fine_cells == 0)
    throw std::invalid_argument(fmt::format(
        "fine grid with {} intervals is an integer multiple of the coarse grid's {} "
        "(inverse crime)",
        fine_cells, coarse_cells));
  while (std::gcd(fine_cells, coarse_cells) != 1) ++fine_cells;
  return static_cast<std::size_t>(fine_cells + 1);
}

std::size_t shared_node_count(std::size_t coarse_points, std::size_t fine_points) {
  const std::size_t a = coarse_points - 1;
  const std::size_t b = fine_points - 1;
  // Coarse node i sits at i/a, fine node j at j/b; they coincide iff i*b == j*a.
  return std::gcd(a, b) + 1;
}

MeasurementSet simulate_measurement(const PulseSpec& spec, const Kernel& kernel,
                                    const SampledGrid& coarse_grid, const NoiseSpec& noise,
                                    FineFactor factor) {
  if (!(noise.delta_percent >= 0.0)) throw std::invalid_argument("delta_percent must be >= 0");
  const std::size_t fine_n = fine_point_count(coarse_grid.n(), factor);
  const SampledGrid fine(coarse_grid.q_min(), coarse_grid.q_max(), fine_n, coarse_grid.q_cw());

  const ComplexSignal x_fine = make_pulse(spec, fine);
  const auto y_fine = apply_forward(kernel_matrix(kernel, fine), x_fine.view(), fine.dq());
  const PolarSignal y_polar = to_polar(y_fine);

  const Axis out_coarse = coarse_grid.output_axis();
  const Axis out_fine = fine.output_axis();
  std::vector<double> a = resample_linear(abs_values(x_fine.view()), fine.input_axis(),
                                          coarse_grid.input_axis());
  std::vector<double> b = resample_linear(y_polar.amplitude, out_fine, out_coarse);
  std::vector<double> psi = resample_linear(y_polar.phase, out_fine, out_coarse);

  if (noise.delta_percent > 0.0) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    perturb_relative(a, noise.delta_percent, rng, normal);
    perturb_relative(b, noise.delta_percent, rng, normal);
    perturb_relative(psi, noise.delta_percent, rng, normal);
  }

  std::vector<cplx> y(out_coarse.size);
  for (std::size_t m = 0; m < y.size(); ++m) y[m] = std::polar(1.0, psi[m]) * b[m];

  return MeasurementSet{coarse_grid,
                        std::move(a),
                        ComplexSignal(out_coarse, std::move(y)),
                        make_pulse(spec, coarse_grid),
                        noise.delta_percent,
                        noise.seed,
                        fine_n,
                        kNoiseGenerator};
}

}  // namespace autoconv
