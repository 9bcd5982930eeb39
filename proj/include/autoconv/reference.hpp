#pragma once

#include <vector>

#include <Eigen/Dense>

#include "autoconv/kernel.hpp"
#include "autoconv/signal.hpp"

/// Serial reference implementations kept for testing and benchmarking.
/// They evaluate the kernel pointwise and locate the partner sample
/// s_m + q_cw - q_j from its coordinate instead of using band index
/// arithmetic, so they share no code path with the parallel kernels.
namespace autoconv::reference {

std::vector<cplx> apply_forward(const Kernel& kernel, const std::vector<cplx>& x,
                                const SampledGrid& grid);

std::vector<cplx> frechet_apply(const Kernel& kernel, const std::vector<cplx>& x0,
                                const std::vector<cplx>& h, const SampledGrid& grid);

Eigen::MatrixXcd frechet_matrix(const Kernel& kernel, const std::vector<cplx>& x0,
                                const SampledGrid& grid);

}  // namespace autoconv::reference
