#include "autoconv/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace autoconv {

void PhysicalKernelParams::validate() const {
  if (!(magnitude_scale > 0.0)) throw std::invalid_argument("magnitude_scale must be > 0");
  if (!(interaction_length > 0.0)) throw std::invalid_argument("interaction_length must be > 0");
  if (!std::isfinite(chi3.real()) || !std::isfinite(chi3.imag()) ||
      !std::isfinite(mismatch_quadratic) || !std::isfinite(carrier_weight) ||
      !std::isfinite(transverse_phase))
    throw std::invalid_argument("physical kernel parameters must be finite");
}

Kernel::Kernel(PhysicalKernelParams p) : v_(p) { p.validate(); }

double sinc(double t) {
  if (std::abs(t) < 1e-8) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

namespace {

struct Evaluator {
  double s;
  double q;

  cplx operator()(const ConstantKernel& c) const { return c.value; }

  cplx operator()(const PhysicalKernelParams& p) const {
    const double detune = q - 0.5 * s;
    const double dk_z = p.mismatch_quadratic * detune * detune;
    const double envelope = sinc(0.5 * dk_z * p.interaction_length);
    const double carrier = 1.0 + p.carrier_weight * s;
    return p.magnitude_scale * p.chi3 * std::polar(carrier * envelope, p.transverse_phase);
  }
};

}  // namespace

cplx Kernel::eval(double s, double q) const { return std::visit(Evaluator{s, q}, v_); }

Kernel Kernel::scaled(double c) const {
  if (auto* k = std::get_if<ConstantKernel>(&v_)) return Kernel::constant(k->value * c);
  auto p = std::get<PhysicalKernelParams>(v_);
  p.magnitude_scale *= c;
  return Kernel::physical(p);
}

double Kernel::nominal_scale() const {
  if (auto* k = std::get_if<ConstantKernel>(&v_)) return std::abs(k->value);
  return std::get<PhysicalKernelParams>(v_).magnitude_scale;
}

KernelMatrix kernel_matrix(const Kernel& kernel, const SampledGrid& grid) {
  const auto rows = static_cast<Eigen::Index>(grid.output_size());
  const auto cols = static_cast<Eigen::Index>(grid.n());
  KernelMatrix k(rows, cols);
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < rows; ++m) {
    const double s = grid.output_node(static_cast<std::size_t>(m)) + grid.q_cw();
    for (Eigen::Index n = 0; n < cols; ++n)
      k(m, n) = kernel.eval(s, grid.input_node(static_cast<std::size_t>(n)));
  }
  return k;
}

double kernel_max(const KernelMatrix& k) {
  double best = 0.0;
  for (Eigen::Index m = 0; m < k.rows(); ++m)
    for (Eigen::Index n = 0; n < k.cols(); ++n) best = std::max(best, std::abs(k(m, n)));
  return best;
}

}  // namespace autoconv
