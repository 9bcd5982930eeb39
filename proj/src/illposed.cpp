#include "autoconv/illposed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "autoconv/forward.hpp"
#include "autoconv/solver.hpp"

namespace autoconv {

void PsiBetaSpec::validate() const {
  if (!(r > 0.0)) throw std::invalid_argument("Psi_beta radius r must be > 0");
  if (!(beta > 0.0 && beta < 0.5)) throw std::invalid_argument("beta must lie in (0, 1/2)");
}

double beta_function(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

ComplexSignal psi_beta_samples(const PsiBetaSpec& spec, const SampledGrid& grid) {
  spec.validate();
  if (grid.q_min() != 0.0) throw std::invalid_argument("Psi_beta needs a grid starting at q = 0");
  const double c = spec.r * std::sqrt(1.0 - 2.0 * spec.beta);
  std::vector<cplx> v(grid.n());
  v[0] = c * std::pow(0.5 * grid.dq(), -spec.beta);
  for (std::size_t i = 1; i < v.size(); ++i) v[i] = c * std::pow(grid.input_node(i), -spec.beta);
  return {grid.input_axis(), std::move(v)};
}

double psi_beta_autoconv_closed_form(const PsiBetaSpec& spec, double s) {
  spec.validate();
  if (!(s >= 0.0 && s <= 2.0)) throw std::invalid_argument("s must lie in [0, 2]");
  if (s == 0.0) return 0.0;
  const double e = 1.0 - 2.0 * spec.beta;
  return spec.r * spec.r * e * std::pow(s, e) * beta_function(1.0 - spec.beta, 1.0 - spec.beta);
}

double psi_beta_image_bound(const PsiBetaSpec& spec) {
  spec.validate();
  const double e = 1.0 - 2.0 * spec.beta;
  return std::numbers::sqrt2 * spec.r * spec.r * e * std::numbers::pi * std::pow(2.0, e);
}

std::vector<IllposednessRow> illposedness_demo(const ComplexSignal& x0, double r,
                                               std::span<const double> betas,
                                               const Kernel& kernel, const SampledGrid& grid) {
  if (!(r > 0.0)) throw std::invalid_argument("r must be > 0");
  if (x0.size() != grid.n()) throw std::invalid_argument("x0 does not live on the grid");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    PsiBetaSpec{r, betas[i]}.validate();
    if (i > 0 && !(betas[i] > betas[i - 1]))
      throw std::invalid_argument("betas must increase toward 1/2");
  }

  const KernelMatrix k = kernel_matrix(kernel, grid);
  const double dq = grid.dq();
  const auto f0 = apply_forward(k, x0.view(), dq);

  std::vector<IllposednessRow> rows;
  for (double beta : betas) {
    const PsiBetaSpec spec{r, beta};
    const ComplexSignal psi = psi_beta_samples(spec, grid);
    std::vector<cplx> xn(x0.values);
    for (std::size_t i = 0; i < xn.size(); ++i) xn[i] += psi.values[i];
    auto fn = apply_forward(k, xn, dq);
    for (std::size_t m = 0; m < fn.size(); ++m) fn[m] -= f0[m];
    rows.push_back({beta, l2_norm(psi), l2_norm(fn, dq), psi_beta_image_bound(spec)});
  }
  return rows;
}

SignResiduals sign_ambiguity_residual(const ComplexSignal& x, const ComplexSignal& y,
                                      const Kernel& kernel, const SampledGrid& grid) {
  if (x.size() != grid.n() || y.size() != grid.output_size())
    throw std::invalid_argument("sign check: x or y does not match the grid");
  const KernelMatrix k = kernel_matrix(kernel, grid);
  std::vector<cplx> neg(x.values);
  for (auto& v : neg) v = -v;
  auto fp = apply_forward(k, x.view(), grid.dq());
  auto fm = apply_forward(k, neg, grid.dq());
  for (std::size_t m = 0; m < fp.size(); ++m) {
    fp[m] -= y.values[m];
    fm[m] -= y.values[m];
  }
  return {l2_norm(fp, grid.dq()), l2_norm(fm, grid.dq())};
}

std::pair<std::size_t, std::size_t> central_window(std::size_t n, double central_fraction) {
  if (!(central_fraction > 0.0 && central_fraction <= 1.0))
    throw std::invalid_argument("central_fraction must lie in (0, 1]");
  auto count = static_cast<std::size_t>(std::llround(central_fraction * static_cast<double>(n)));
  count = std::clamp<std::size_t>(count, 1, n);
  return {(n - count) / 2, count};
}

ReconstructionError reconstruction_error(const ComplexSignal& x_rec, const ComplexSignal& x_true,
                                         double central_fraction) {
  if (x_rec.size() != x_true.size())
    throw std::invalid_argument(fmt::format("reconstruction has {} samples, truth has {}",
                                            x_rec.size(), x_true.size()));
  const auto [first, count] = central_window(x_rec.size(), central_fraction);
  const auto gd_rec = group_delay(x_rec);
  const auto gd_true = group_delay(x_true.view(), x_rec.axis.step);
  double amp = 0.0, gd = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    const double da = std::abs(x_rec.values[i]) - std::abs(x_true.values[i]);
    const double dg = gd_rec[i] - gd_true[i];
    amp += da * da;
    gd += dg * dg;
  }
  const auto c = static_cast<double>(count);
  return {std::sqrt(amp / c), std::sqrt(gd / c)};
}

}  // namespace autoconv
