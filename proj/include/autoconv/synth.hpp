#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autoconv/kernel.hpp"
#include "autoconv/signal.hpp"

namespace autoconv {

enum class PulseShape { SmoothSinglePeak, TwoPeakSinusoidalPhase };

/// Synthetic fundamental pulse. Positions and widths are fractions of the
/// grid interval [q_min, q_max].
///
/// SmoothSinglePeak: Gaussian amplitude, phase pi*((q - q_mid)/q_half)^3
/// clipped to [-pi, pi], q_half = phase_half_width * (q_max - q_min).
/// TwoPeakSinusoidalPhase: two Gaussians, phase a*sin(2 pi f (q-q_min)/(q_max-q_min)).
struct PulseSpec {
  PulseShape shape = PulseShape::SmoothSinglePeak;
  double amplitude_max = 1e-7;

  // SmoothSinglePeak
  double center = 0.5;
  double width = 0.2;
  double phase_half_width = 0.5;

  // TwoPeakSinusoidalPhase
  double center1 = 0.35;
  double center2 = 0.65;
  double width1 = 0.25;
  double width2 = 0.25;
  double second_peak_ratio = 0.7;
  double phase_amplitude = 0.5;
  double phase_frequency = 1.0;

  void validate() const;
};

struct NoiseSpec {
  double delta_percent = 0.0;
  std::uint64_t seed = 0;
};

/// Ratio between fine and coarse interval counts, num/den.
struct FineFactor {
  int num = 7;
  int den = 3;
};

struct MeasurementSet {
  SampledGrid grid;
  std::vector<double> a_hat;
  ComplexSignal y_delta;
  ComplexSignal ground_truth;
  double delta_percent = 0.0;
  std::uint64_t seed = 0;
  std::size_t fine_points = 0;
  std::string generator;
};

/// Name of the pinned noise generator, recorded in measurement metadata.
inline constexpr const char* kNoiseGenerator = "mt19937_64+std::normal_distribution(libstdc++)";

ComplexSignal make_pulse(const PulseSpec& spec, const SampledGrid& grid);

/// Node count of the fine simulation grid for a coarse grid with n points:
/// round(num/den * (n-1)) + 1, nudged upward until the interval counts are
/// coprime so that only the endpoints coincide. Throws when the requested
/// ratio is an integer multiple in either direction.
std::size_t fine_point_count(std::size_t n, FineFactor factor);

/// Number of coarse nodes that coincide with fine nodes (exact integer test).
std::size_t shared_node_count(std::size_t coarse_points, std::size_t fine_points);

/// Forward-simulates on a fine grid, resamples amplitude and unwrapped phase
/// of the data to the coarse grid, and applies relative Gaussian noise
/// v * (1 + delta/100 * xi) to A, then B, then psi.
MeasurementSet simulate_measurement(const PulseSpec& spec, const Kernel& kernel,
                                    const SampledGrid& coarse_grid, const NoiseSpec& noise,
                                    FineFactor factor = {});

/// Applies v * (1 + delta/100 * xi) in place, drawing xi in sequence.
template <typename Rng, typename Normal>
void perturb_relative(std::vector<double>& values, double delta_percent, Rng& rng, Normal& normal) {
  const double rel = delta_percent / 100.0;
  for (double& v : values) v *= 1.0 + rel * normal(rng);
}

}  // namespace autoconv
