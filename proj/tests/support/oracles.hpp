#pragma once

// Brute-force oracles for the tests. They only share the kernel evaluation
// with the library; all index and coordinate bookkeeping is redone here.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "autoconv/kernel.hpp"
#include "autoconv/signal.hpp"

namespace oracle {

using cplx = std::complex<double>;

inline double input_node(const autoconv::SampledGrid& g, std::size_t i) {
  const double dq = (g.q_max() - g.q_min()) / static_cast<double>(g.n() - 1);
  return g.q_min() + static_cast<double>(i) * dq;
}

inline double output_node(const autoconv::SampledGrid& g, std::size_t m) {
  const double dq = (g.q_max() - g.q_min()) / static_cast<double>(g.n() - 1);
  return 2.0 * g.q_min() - g.q_cw() + static_cast<double>(m) * dq;
}

// y_m = sum over all pairs (i, j) with i + j = m of k(s_m + q_cw, q_i) x_i x_j dq.
inline std::vector<cplx> autoconv(const autoconv::Kernel& k, const std::vector<cplx>& x,
                                  const autoconv::SampledGrid& g) {
  const std::size_t n = x.size();
  const double dq = (g.q_max() - g.q_min()) / static_cast<double>(n - 1);
  std::vector<cplx> y(2 * n - 1, cplx{0.0, 0.0});
  for (std::size_t m = 0; m < 2 * n - 1; ++m)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i + j == m) y[m] += k.eval(output_node(g, m) + g.q_cw(), input_node(g, i)) * x[i] * x[j] * dq;
  return y;
}

// Directional derivative of the map above, by the product rule.
inline std::vector<cplx> derivative(const autoconv::Kernel& k, const std::vector<cplx>& x0,
                                    const std::vector<cplx>& h, const autoconv::SampledGrid& g) {
  const std::size_t n = x0.size();
  const double dq = (g.q_max() - g.q_min()) / static_cast<double>(n - 1);
  std::vector<cplx> y(2 * n - 1, cplx{0.0, 0.0});
  for (std::size_t m = 0; m < 2 * n - 1; ++m)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i + j == m)
          y[m] += k.eval(output_node(g, m) + g.q_cw(), input_node(g, i)) *
                  (h[i] * x0[j] + x0[i] * h[j]) * dq;
  return y;
}

inline std::vector<cplx> random_complex(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& z : v) {
    const double re = nd(rng);
    z = {re, nd(rng)};
  }
  return v;
}

inline double norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline double rel_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::norm(a[i] - b[i]);
  return std::sqrt(d) / norm(b);
}

}  // namespace oracle
