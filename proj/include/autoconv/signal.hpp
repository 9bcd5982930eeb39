#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace autoconv {

using cplx = std::complex<double>;

/// Equidistant node sequence start + i*step, i = 0..size-1.
struct Axis {
  double start = 0.0;
  double step = 1.0;
  std::size_t size = 0;

  double node(std::size_t i) const { return start + static_cast<double>(i) * step; }
  double last() const { return node(size - 1); }
  std::vector<double> nodes() const;
};

/// Solution-side grid q_n on [q_min, q_max] and the derived data-side grid
/// s_m = 2 q_min - q_cw + (m-1) dq with 2N-1 nodes.
class SampledGrid {
 public:
  SampledGrid(double q_min, double q_max, std::size_t n_points, double q_cw = 0.0);

  double q_min() const { return q_min_; }
  double q_max() const { return q_max_; }
  double q_cw() const { return q_cw_; }
  double dq() const { return dq_; }
  std::size_t n() const { return n_; }
  std::size_t output_size() const { return 2 * n_ - 1; }

  double input_node(std::size_t i) const { return q_min_ + static_cast<double>(i) * dq_; }
  double output_node(std::size_t m) const {
    return 2.0 * q_min_ - q_cw_ + static_cast<double>(m) * dq_;
  }

  Axis input_axis() const { return {q_min_, dq_, n_}; }
  Axis output_axis() const { return {2.0 * q_min_ - q_cw_, dq_, output_size()}; }

  bool operator==(const SampledGrid&) const = default;

 private:
  double q_min_;
  double q_max_;
  std::size_t n_;
  double q_cw_;
  double dq_;
};

SampledGrid make_grid(double q_min, double q_max, std::size_t n_points, double q_cw = 0.0);

/// Complex samples attached to an equidistant axis.
struct ComplexSignal {
  Axis axis;
  std::vector<cplx> values;

  ComplexSignal() = default;
  ComplexSignal(Axis a, std::vector<cplx> v);

  std::size_t size() const { return values.size(); }
  std::span<const cplx> view() const { return values; }
};

struct PolarSignal {
  std::vector<double> amplitude;
  std::vector<double> phase;
};

/// Principal argument, then unwrapped along the grid; zero samples get phase 0.
/// The unwrapped curve keeps the principal value at the largest-amplitude sample.
PolarSignal to_polar(std::span<const cplx> x);
PolarSignal to_polar(const ComplexSignal& x);
std::vector<cplx> recompose(const PolarSignal& p);

/// Adds multiples of 2*pi so that consecutive entries never jump by more than pi.
std::vector<double> unwrap_phase(std::span<const double> wrapped);

/// Piecewise-linear interpolation onto `target`; throws on extrapolation.
std::vector<double> resample_linear(std::span<const double> values, const Axis& source,
                                    const Axis& target);
ComplexSignal resample_linear(const ComplexSignal& x, const Axis& target);

/// Rectangular-rule L2 norm (sum |z|^2 step)^(1/2).
double l2_norm(std::span<const cplx> x, double step);
double l2_norm(std::span<const double> x, double step);
double l2_norm(const ComplexSignal& x);

std::vector<double> abs_values(std::span<const cplx> x);

}  // namespace autoconv
