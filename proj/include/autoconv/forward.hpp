#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "autoconv/kernel.hpp"
#include "autoconv/signal.hpp"

namespace autoconv {

/// Discretized kernel autoconvolution (rectangular rule)
///   y_m = sum_j k(s_m, q_j) x_j x_{m-j} dq,   m = 0..2N-2,
/// with x taken as zero outside the solution grid. The partner index m-j is
/// exact integer arithmetic: s_m + q_cw - q_j always lands on node m-j.
///
/// Rows are computed in parallel; each row sums in a fixed order, so the
/// result does not depend on the number of threads.
std::vector<cplx> apply_forward(const KernelMatrix& k, std::span<const cplx> x, double dq);
ComplexSignal apply_forward(const Kernel& kernel, const ComplexSignal& x, const SampledGrid& grid);

/// Matrix F(x) with F(x) x = apply_forward(x), entry (m,j) = dq k_{m,j} x_{m-j}.
struct ForwardMatrix {
  Eigen::MatrixXcd entries;
  SampledGrid grid;
};

Eigen::MatrixXcd forward_matrix(const KernelMatrix& k, std::span<const cplx> x, double dq);
ForwardMatrix forward_matrix(const Kernel& kernel, const ComplexSignal& x, const SampledGrid& grid);

/// Frechet derivative action
///   (F'(x0) h)_m = sum_j (k(s_m,q_j) + k(s_m,q_{m-j})) x0_{m-j} h_j dq.
std::vector<cplx> frechet_apply(const KernelMatrix& k, std::span<const cplx> x0,
                                std::span<const cplx> h, double dq);
ComplexSignal frechet_apply(const Kernel& kernel, const ComplexSignal& x0, const ComplexSignal& h,
                            const SampledGrid& grid);

/// Jacobian matrix of the forward map; its adjoint is the conjugate transpose.
Eigen::MatrixXcd frechet_matrix(const KernelMatrix& k, std::span<const cplx> x0, double dq);
Eigen::MatrixXcd frechet_matrix(const Kernel& kernel, const ComplexSignal& x0,
                                const SampledGrid& grid);

/// Row-major CSV dump with "re+imi" cells, for debugging.
void write_matrix_csv(const Eigen::MatrixXcd& m, const std::string& path);

}  // namespace autoconv
