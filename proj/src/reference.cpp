#include "autoconv/reference.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace autoconv::reference {

namespace {

// Index of the solution node at coordinate q, or nothing outside [q_min, q_max].
std::optional<std::size_t> node_at(const SampledGrid& grid, double q) {
  const double t = (q - grid.q_min()) / grid.dq();
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-6) throw std::logic_error("partner coordinate is not a grid node");
  if (r < 0.0 || r > static_cast<double>(grid.n() - 1)) return std::nullopt;
  return static_cast<std::size_t>(r);
}

void check(const std::vector<cplx>& x, const SampledGrid& grid) {
  if (x.size() != grid.n()) throw std::invalid_argument("signal length does not match grid");
}

}  // namespace

std::vector<cplx> apply_forward(const Kernel& kernel, const std::vector<cplx>& x,
                                const SampledGrid& grid) {
  check(x, grid);
  std::vector<cplx> y(grid.output_size());
  for (std::size_t m = 0; m < y.size(); ++m) {
    const double s = grid.output_node(m) + grid.q_cw();
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < grid.n(); ++j) {
      const double qj = grid.input_node(j);
      const auto partner = node_at(grid, s - qj);
      if (!partner) continue;
      acc += kernel.eval(s, qj) * x[j] * x[*partner];
    }
    y[m] = acc * grid.dq();
  }
  return y;
}

std::vector<cplx> frechet_apply(const Kernel& kernel, const std::vector<cplx>& x0,
                                const std::vector<cplx>& h, const SampledGrid& grid) {
  check(x0, grid);
  check(h, grid);
  const Eigen::MatrixXcd jac = frechet_matrix(kernel, x0, grid);
  const Eigen::VectorXcd hv = Eigen::Map<const Eigen::VectorXcd>(h.data(), h.size());
  const Eigen::VectorXcd out = jac * hv;
  return {out.data(), out.data() + out.size()};
}

Eigen::MatrixXcd frechet_matrix(const Kernel& kernel, const std::vector<cplx>& x0,
                                const SampledGrid& grid) {
  check(x0, grid);
  const auto rows = static_cast<Eigen::Index>(grid.output_size());
  const auto cols = static_cast<Eigen::Index>(grid.n());
  Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(rows, cols);
  for (Eigen::Index m = 0; m < rows; ++m) {
    const double s = grid.output_node(static_cast<std::size_t>(m)) + grid.q_cw();
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double qj = grid.input_node(static_cast<std::size_t>(j));
      const auto partner = node_at(grid, s - qj);
      if (!partner) continue;
      const double q_partner = grid.input_node(*partner);
      jac(m, j) = (kernel.eval(s, qj) + kernel.eval(s, q_partner)) * x0[*partner] * grid.dq();
    }
  }
  return jac;
}

}  // namespace autoconv::reference
