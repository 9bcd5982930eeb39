#pragma once

#include <variant>

#include <Eigen/Dense>

#include "autoconv/signal.hpp"

namespace autoconv {

/// Parameters of the sinc phase-mismatch kernel
///   k(s,q) = scale * chi3 * (1 + carrier_weight*s) * exp(i*transverse_phase)
///            * sinc(mismatch_quadratic * (q - s/2)^2 * L / 2).
/// The mismatch vanishes at q = s/2 (symmetric four-wave mixing), so the
/// kernel is symmetric under q -> s - q.
struct PhysicalKernelParams {
  double magnitude_scale = 1e28;
  cplx chi3{1.0, 0.0};
  double mismatch_quadratic = 0.0;
  double interaction_length = 1.0;
  double carrier_weight = 0.0;
  double transverse_phase = 0.0;

  void validate() const;
};

struct ConstantKernel {
  cplx value{1.0, 0.0};
};

class Kernel {
 public:
  using Variant = std::variant<ConstantKernel, PhysicalKernelParams>;

  Kernel() = default;
  explicit Kernel(ConstantKernel c) : v_(c) {}
  explicit Kernel(PhysicalKernelParams p);

  static Kernel constant(cplx c) { return Kernel(ConstantKernel{c}); }
  static Kernel physical(const PhysicalKernelParams& p) { return Kernel(p); }

  cplx eval(double s, double q) const;

  bool is_constant() const { return std::holds_alternative<ConstantKernel>(v_); }
  const Variant& variant() const { return v_; }

  /// Returns a kernel multiplied by c (used for scaling studies).
  Kernel scaled(double c) const;

  /// Nominal magnitude entering the alpha normalization: magnitude_scale for the
  /// physical kernel, |c| for a constant one.
  double nominal_scale() const;

 private:
  Variant v_{ConstantKernel{}};
};

double sinc(double t);

/// Row-major (2N-1) x N table k_{m,n} = k(s_m + q_cw, q_n).
using KernelMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

KernelMatrix kernel_matrix(const Kernel& kernel, const SampledGrid& grid);

/// max |k_{m,n}| over the grid.
double kernel_max(const KernelMatrix& k);

}  // namespace autoconv
