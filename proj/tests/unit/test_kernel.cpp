#include <cmath>
#include <random>

#include "doctest.h"

#include "autoconv/config.hpp"
#include "autoconv/kernel.hpp"

using namespace autoconv;
using doctest::Approx;

TEST_CASE("kernel: constant one") {
  const Kernel k = Kernel::constant(1.0);
  CHECK(k.eval(0.3, 0.1) == cplx{1.0, 0.0});
  CHECK(k.eval(-5.0, 7.0) == cplx{1.0, 0.0});
  CHECK(k.nominal_scale() == 1.0);
}

TEST_CASE("kernel: physical with modulations off is the bare scale") {
  PhysicalKernelParams p;
  p.magnitude_scale = 1e28;
  const Kernel k = Kernel::physical(p);
  const auto g = make_grid(2e15, 2.6e15, 16);
  for (std::size_t m = 0; m < g.output_size(); ++m)
    for (std::size_t n = 0; n < g.n(); ++n) CHECK(k.eval(g.output_node(m), g.input_node(n)) == cplx{1e28, 0.0});
}

TEST_CASE("kernel: modulus peaks at q = s/2") {
  const Kernel k = Kernel::physical(reference_kernel_params());
  const double s = 4.6e15;
  const double peak = std::abs(k.eval(s, s / 2.0));
  double best = 0.0, best_q = 0.0;
  for (int i = -2000; i <= 2000; ++i) {
    const double q = s / 2.0 + 1e11 * i;
    const double v = std::abs(k.eval(s, q));
    if (v > best) {
      best = v;
      best_q = q;
    }
  }
  CHECK(best == Approx(peak).epsilon(1e-15));
  CHECK(best_q == s / 2.0);
  CHECK(std::abs(k.eval(s, s / 2.0 + 3e14)) < peak);
}

TEST_CASE("kernel: symmetric under q -> s - q") {
  const Kernel k = Kernel::physical(reference_kernel_params());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(2e15, 2.6e15);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    const double s = a + b;
    const cplx ka = k.eval(s, a), kb = k.eval(s, b);
    CHECK(std::abs(ka - kb) <= 1e-12 * std::abs(ka));
  }
}

TEST_CASE("kernel matrix: constant one on N = 3") {
  const auto g = make_grid(0.0, 1.0, 3);
  const KernelMatrix m = kernel_matrix(Kernel::constant(1.0), g);
  REQUIRE(m.rows() == 5);
  REQUIRE(m.cols() == 3);
  for (Eigen::Index r = 0; r < 5; ++r)
    for (Eigen::Index c = 0; c < 3; ++c) CHECK(m(r, c) == cplx{1.0, 0.0});
}

TEST_CASE("kernel matrix: constant 2i on N = 2") {
  const KernelMatrix m = kernel_matrix(Kernel::constant({0.0, 2.0}), make_grid(0.0, 1.0, 2));
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  for (Eigen::Index r = 0; r < 3; ++r)
    for (Eigen::Index c = 0; c < 2; ++c) CHECK(m(r, c) == cplx{0.0, 2.0});
}

TEST_CASE("kernel matrix: entries are evaluated at s_m + q_cw") {
  PhysicalKernelParams p = reference_kernel_params();
  const Kernel k = Kernel::physical(p);
  const auto g = make_grid(2e15, 2.6e15, 9, 1.7e15);
  const KernelMatrix m = kernel_matrix(k, g);
  for (std::size_t r = 0; r < g.output_size(); ++r)
    for (std::size_t c = 0; c < g.n(); ++c) {
      const cplx want = k.eval(g.output_node(r) + g.q_cw(), g.input_node(c));
      CHECK(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) == want);
    }
}

TEST_CASE("kernel max: matches brute force on N = 64") {
  const Kernel k = Kernel::physical(reference_kernel_params());
  const auto g = make_grid(2e15, 2.6e15, 64);
  double brute = 0.0;
  for (std::size_t r = 0; r < g.output_size(); ++r)
    for (std::size_t c = 0; c < g.n(); ++c)
      brute = std::max(brute, std::abs(k.eval(g.output_node(r), g.input_node(c))));
  CHECK(kernel_max(kernel_matrix(k, g)) == Approx(brute).epsilon(1e-12));
}

TEST_CASE("kernel: continuous in q") {
  const Kernel k = Kernel::physical(reference_kernel_params());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(2e15, 2.6e15);
  for (int i = 0; i < 50; ++i) {
    const double s = u(rng) + u(rng);
    const double q = u(rng);
    const double d10 = std::abs(k.eval(s, q + 1e10) - k.eval(s, q));
    const double d8 = std::abs(k.eval(s, q + 1e8) - k.eval(s, q));
    CHECK(d10 <= 1e-3 * k.nominal_scale());
    CHECK(d8 <= 1e-5 * k.nominal_scale());
  }
}

TEST_CASE("sinc: removable singularity") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(1e-9) == Approx(1.0).epsilon(1e-15));
  CHECK(sinc(1e-7) == Approx(std::sin(1e-7) / 1e-7).epsilon(1e-15));
  CHECK(sinc(3.0) == Approx(std::sin(3.0) / 3.0).epsilon(1e-15));
}

TEST_CASE("kernel: parameter validation") {
  PhysicalKernelParams p;
  p.magnitude_scale = 0.0;
  CHECK_THROWS_AS(Kernel::physical(p), std::invalid_argument);
  p = PhysicalKernelParams{};
  p.interaction_length = -1.0;
  CHECK_THROWS_AS(Kernel::physical(p), std::invalid_argument);
  p = PhysicalKernelParams{};
  p.carrier_weight = NAN;
  CHECK_THROWS_AS(Kernel::physical(p), std::invalid_argument);
}

TEST_CASE("kernel: scaled multiplies every value") {
  const Kernel k = Kernel::physical(reference_kernel_params());
  const Kernel k2 = k.scaled(1e14);
  CHECK(k2.nominal_scale() == Approx(1e14 * k.nominal_scale()));
  CHECK(std::abs(k2.eval(4.5e15, 2.2e15) - 1e14 * k.eval(4.5e15, 2.2e15)) <=
        1e-14 * std::abs(k2.eval(4.5e15, 2.2e15)));
  CHECK(Kernel::constant({0.0, 2.0}).scaled(3.0).eval(0.0, 0.0) == cplx{0.0, 6.0});
}
