#include "autoconv/forward.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace autoconv {

namespace {

void require_shapes(const KernelMatrix& k, std::size_t n) {
  if (n < 2) throw std::invalid_argument("signal needs at least 2 samples");
  if (static_cast<std::size_t>(k.cols()) != n || static_cast<std::size_t>(k.rows()) != 2 * n - 1)
    throw std::invalid_argument(fmt::format(
        "kernel matrix is {}x{}, expected {}x{} for a length-{} signal", k.rows(), k.cols(),
        2 * n - 1, n, n));
}

void require_on_grid(const ComplexSignal& x, const SampledGrid& grid, const char* what) {
  if (x.size() != grid.n())
    throw std::invalid_argument(
        fmt::format("{} has {} samples but the grid has {} nodes", what, x.size(), grid.n()));
}

// Band of row m: j in [lo, hi], partner index m - j in [0, n-1].
inline std::pair<Eigen::Index, Eigen::Index> band(Eigen::Index m, Eigen::Index n) {
  return {std::max<Eigen::Index>(0, m - n + 1), std::min<Eigen::Index>(m, n - 1)};
}

}  // namespace

std::vector<cplx> apply_forward(const KernelMatrix& k, std::span<const cplx> x, double dq) {
  require_shapes(k, x.size());
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index rows = 2 * n - 1;
  std::vector<cplx> y(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < rows; ++m) {
    const auto [lo, hi] = band(m, n);
    cplx acc{0.0, 0.0};
    for (Eigen::Index j = lo; j <= hi; ++j) acc += k(m, j) * x[j] * x[m - j];
    y[static_cast<std::size_t>(m)] = acc * dq;
  }
  return y;
}

ComplexSignal apply_forward(const Kernel& kernel, const ComplexSignal& x, const SampledGrid& grid) {
  require_on_grid(x, grid, "x");
  return {grid.output_axis(), apply_forward(kernel_matrix(kernel, grid), x.view(), grid.dq())};
}

Eigen::MatrixXcd forward_matrix(const KernelMatrix& k, std::span<const cplx> x, double dq) {
  require_shapes(k, x.size());
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(2 * n - 1, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < 2 * n - 1; ++m) {
    const auto [lo, hi] = band(m, n);
    for (Eigen::Index j = lo; j <= hi; ++j) f(m, j) = dq * k(m, j) * x[m - j];
  }
  return f;
}

ForwardMatrix forward_matrix(const Kernel& kernel, const ComplexSignal& x, const SampledGrid& grid) {
  require_on_grid(x, grid, "x");
  return {forward_matrix(kernel_matrix(kernel, grid), x.view(), grid.dq()), grid};
}

std::vector<cplx> frechet_apply(const KernelMatrix& k, std::span<const cplx> x0,
                                std::span<const cplx> h, double dq) {
  require_shapes(k, x0.size());
  if (h.size() != x0.size()) throw std::invalid_argument("frechet_apply: x0 and h lengths differ");
  const auto n = static_cast<Eigen::Index>(x0.size());
  const Eigen::Index rows = 2 * n - 1;
  std::vector<cplx> out(static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < rows; ++m) {
    const auto [lo, hi] = band(m, n);
    cplx acc{0.0, 0.0};
    for (Eigen::Index j = lo; j <= hi; ++j) acc += (k(m, j) + k(m, m - j)) * x0[m - j] * h[j];
    out[static_cast<std::size_t>(m)] = acc * dq;
  }
  return out;
}

ComplexSignal frechet_apply(const Kernel& kernel, const ComplexSignal& x0, const ComplexSignal& h,
                            const SampledGrid& grid) {
  require_on_grid(x0, grid, "x0");
  require_on_grid(h, grid, "h");
  return {grid.output_axis(),
          frechet_apply(kernel_matrix(kernel, grid), x0.view(), h.view(), grid.dq())};
}

Eigen::MatrixXcd frechet_matrix(const KernelMatrix& k, std::span<const cplx> x0, double dq) {
  require_shapes(k, x0.size());
  const auto n = static_cast<Eigen::Index>(x0.size());
  Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(2 * n - 1, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < 2 * n - 1; ++m) {
    const auto [lo, hi] = band(m, n);
    for (Eigen::Index j = lo; j <= hi; ++j) jac(m, j) = dq * (k(m, j) + k(m, m - j)) * x0[m - j];
  }
  return jac;
}

Eigen::MatrixXcd frechet_matrix(const Kernel& kernel, const ComplexSignal& x0,
                                const SampledGrid& grid) {
  require_on_grid(x0, grid, "x0");
  return frechet_matrix(kernel_matrix(kernel, grid), x0.view(), grid.dq());
}

void write_matrix_csv(const Eigen::MatrixXcd& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const cplx z = m(r, c);
      out << fmt::format("{:.17g}{}{:.17g}i", z.real(), z.imag() < 0 ? "-" : "+",
                         std::abs(z.imag()));
      out << (c + 1 < m.cols() ? ',' : '\n');
    }
  }
}

}  // namespace autoconv
