#pragma once

#include <span>
#include <vector>

#include "autoconv/kernel.hpp"
#include "autoconv/signal.hpp"

namespace autoconv {

/// Psi_beta(q) = r sqrt(1 - 2 beta) q^-beta on (0, 1]: unit-norm-r functions
/// whose autoconvolution vanishes as beta -> 1/2.
struct PsiBetaSpec {
  double r = 1.0;
  double beta = 0.25;

  void validate() const;
};

/// Samples on a grid starting at q = 0; the pole node takes the value at dq/2.
ComplexSignal psi_beta_samples(const PsiBetaSpec& spec, const SampledGrid& grid);

/// r^2 (1 - 2 beta) s^(1 - 2 beta) B(1 - beta, 1 - beta), B via log-Gamma.
double psi_beta_autoconv_closed_form(const PsiBetaSpec& spec, double s);

/// sqrt(2) r^2 (1 - 2 beta) pi 2^(1 - 2 beta)
double psi_beta_image_bound(const PsiBetaSpec& spec);

double beta_function(double a, double b);

struct IllposednessRow {
  double beta = 0.0;
  double perturbation_norm = 0.0;  // ||Psi_beta||
  double image_diff_norm = 0.0;    // ||F(x0 + Psi_beta) - F(x0)||
  double bound = 0.0;
};

std::vector<IllposednessRow> illposedness_demo(const ComplexSignal& x0, double r,
                                               std::span<const double> betas,
                                               const Kernel& kernel, const SampledGrid& grid);

struct SignResiduals {
  double plus = 0.0;   // ||F(x) - y||
  double minus = 0.0;  // ||F(-x) - y||
};

SignResiduals sign_ambiguity_residual(const ComplexSignal& x, const ComplexSignal& y,
                                      const Kernel& kernel, const SampledGrid& grid);

struct ReconstructionError {
  double amp_rmse = 0.0;
  double gd_rmse = 0.0;
};

/// Index window [first, first + count) covering the central fraction of n nodes.
std::pair<std::size_t, std::size_t> central_window(std::size_t n, double central_fraction);

/// Amplitude and group-delay RMSE over the central window. Group delay is
/// blind to a global sign and to constant phase offsets.
ReconstructionError reconstruction_error(const ComplexSignal& x_rec, const ComplexSignal& x_true,
                                         double central_fraction = 0.6);

}  // namespace autoconv
