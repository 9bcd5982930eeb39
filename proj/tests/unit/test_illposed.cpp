#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "autoconv/forward.hpp"
#include "autoconv/illposed.hpp"
#include "autoconv/solver.hpp"
#include "autoconv/synth.hpp"

using namespace autoconv;
using doctest::Approx;

TEST_CASE("psi: closed-form autoconvolution") {
  CHECK(psi_beta_autoconv_closed_form({1.0, 0.25}, 0.0) == 0.0);
  CHECK(psi_beta_autoconv_closed_form({1.0, 0.25}, 1.0) ==
        Approx(0.847213084793979086606499123482).epsilon(1e-13));
  // r^2 scaling and s^(1 - 2 beta) growth.
  CHECK(psi_beta_autoconv_closed_form({2.0, 0.25}, 1.0) ==
        Approx(4.0 * 0.847213084793979086606499123482).epsilon(1e-13));
  CHECK(psi_beta_autoconv_closed_form({1.0, 0.25}, 0.25) ==
        Approx(0.5 * 0.847213084793979086606499123482).epsilon(1e-13));
  CHECK_THROWS_AS(psi_beta_autoconv_closed_form({1.0, 0.25}, -0.1), std::invalid_argument);
}

TEST_CASE("psi: beta function against known values") {
  CHECK(beta_function(1.0, 1.0) == Approx(1.0).epsilon(1e-14));
  CHECK(beta_function(0.5, 0.5) == Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(beta_function(2.0, 3.0) == Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("psi: parameter validation") {
  CHECK_THROWS_AS(PsiBetaSpec({-1.0, 0.25}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PsiBetaSpec({0.0, 0.25}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PsiBetaSpec({1.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PsiBetaSpec({1.0, 0.5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(psi_beta_samples({1.0, 0.25}, make_grid(0.5, 1.0, 10)), std::invalid_argument);
}

TEST_CASE("psi: samples at q = 1 tend to r as beta -> 0") {
  const auto g = make_grid(0.0, 1.0, 11);
  const auto psi = psi_beta_samples({0.7, 1e-9}, g);
  CHECK(psi.values.back().real() == Approx(0.7).epsilon(1e-8));
  const auto p2 = psi_beta_samples({0.7, 0.3}, g);
  CHECK(p2.values[5].real() == Approx(0.7 * std::sqrt(0.4) * std::pow(0.5, -0.3)).epsilon(1e-14));
  CHECK(p2.values[0].real() == Approx(0.7 * std::sqrt(0.4) * std::pow(0.05, -0.3)).epsilon(1e-14));
}

TEST_CASE("psi: discrete norm approaches r under refinement") {
  for (std::size_t n : {201, 2001, 20001}) {
    const auto g = make_grid(0.0, 1.0, n);
    const double err = std::abs(l2_norm(psi_beta_samples({1.0, 0.25}, g)) - 1.0);
    CHECK(err < 0.5 * std::sqrt(g.dq()));
  }
}

TEST_CASE("psi: discrete autoconvolution approaches the closed form inside (0, 1]") {
  const PsiBetaSpec spec{1.0, 0.25};
  double prev_half = INFINITY, prev_one = INFINITY;
  for (std::size_t n : {201, 2001}) {
    const auto g = make_grid(0.0, 1.0, n);
    const auto psi = psi_beta_samples(spec, g);
    const auto y = apply_forward(kernel_matrix(Kernel::constant(1.0), g), psi.view(), g.dq());
    const std::size_t half = (n - 1) / 2, one = n - 1;
    const double e_half = std::abs(y[half].real() / psi_beta_autoconv_closed_form(spec, 0.5) - 1.0);
    const double e_one = std::abs(y[one].real() / psi_beta_autoconv_closed_form(spec, 1.0) - 1.0);
    CHECK(e_half < prev_half);
    CHECK(e_one < prev_one);
    prev_half = e_half;
    prev_one = e_one;
  }
  CHECK(prev_half < 0.02);
  CHECK(prev_one < 0.02);
}

TEST_CASE("demo: image norm stays below the bound and falls as beta -> 1/2") {
  const auto g = make_grid(0.0, 1.0, 2001);
  const ComplexSignal zero(g.input_axis(), std::vector<cplx>(g.n()));
  const std::vector<double> betas{0.3, 0.4, 0.45, 0.49};
  const auto rows = illposedness_demo(zero, 1.0, betas, Kernel::constant(1.0), g);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].beta == betas[i]);
    CHECK(rows[i].image_diff_norm <= rows[i].bound);
    CHECK(rows[i].bound == Approx(psi_beta_image_bound({1.0, betas[i]})));
    if (i > 0) CHECK(rows[i].image_diff_norm < rows[i - 1].image_diff_norm);
  }
}

TEST_CASE("demo: decreasing around a nonzero pulse with r = 0.1") {
  const auto g = make_grid(0.0, 1.0, 2001);
  PulseSpec p;
  p.amplitude_max = 1.0;
  const auto x0 = make_pulse(p, g);
  const std::vector<double> betas{0.3, 0.4, 0.45, 0.49};
  const auto rows = illposedness_demo(x0, 0.1, betas, Kernel::constant(1.0), g);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].image_diff_norm < rows[i - 1].image_diff_norm);
}

TEST_CASE("demo: single beta gives a single row with a norm close to r") {
  const auto g = make_grid(0.0, 1.0, 2001);
  const ComplexSignal zero(g.input_axis(), std::vector<cplx>(g.n()));
  const std::vector<double> betas{0.25};
  const auto rows = illposedness_demo(zero, 1.0, betas, Kernel::constant(1.0), g);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].perturbation_norm == Approx(1.0).epsilon(0.03));
}

TEST_CASE("demo: invalid inputs") {
  const auto g = make_grid(0.0, 1.0, 101);
  const ComplexSignal zero(g.input_axis(), std::vector<cplx>(g.n()));
  const std::vector<double> good{0.3}, unsorted{0.4, 0.3}, outside{0.6};
  CHECK_THROWS_AS(illposedness_demo(zero, 0.0, good, Kernel::constant(1.0), g), std::invalid_argument);
  CHECK_THROWS_AS(illposedness_demo(zero, -1.0, good, Kernel::constant(1.0), g), std::invalid_argument);
  CHECK_THROWS_AS(illposedness_demo(zero, 1.0, unsorted, Kernel::constant(1.0), g), std::invalid_argument);
  CHECK_THROWS_AS(illposedness_demo(zero, 1.0, outside, Kernel::constant(1.0), g), std::invalid_argument);
}

TEST_CASE("sign ambiguity: x and -x fit any data equally well") {
  std::mt19937_64 rng(60);
  const auto g = make_grid(0.0, 1.0, 40);
  const Kernel k = Kernel::constant({0.3, 1.2});
  const ComplexSignal x(g.input_axis(), oracle::random_complex(40, rng));
  const ComplexSignal y(g.output_axis(), oracle::random_complex(79, rng));
  const auto r = sign_ambiguity_residual(x, y, k, g);
  CHECK(r.plus == r.minus);
  CHECK(r.plus > 0.0);

  const auto exact = apply_forward(k, x, g);
  const auto e = sign_ambiguity_residual(x, exact, k, g);
  CHECK(e.plus == 0.0);
  CHECK(e.minus == 0.0);
}

TEST_CASE("reconstruction error: invariances") {
  const auto g = make_grid(0.0, 1.0, 64);
  PulseSpec p;
  p.shape = PulseShape::TwoPeakSinusoidalPhase;
  const auto x = make_pulse(p, g);
  const auto same = reconstruction_error(x, x);
  CHECK(same.amp_rmse == 0.0);
  CHECK(same.gd_rmse == 0.0);

  ComplexSignal neg = x, rot = x;
  for (auto& z : neg.values) z = -z;
  for (auto& z : rot.values) z *= std::polar(1.0, 2.3);
  CHECK(reconstruction_error(neg, x).amp_rmse == 0.0);
  CHECK(reconstruction_error(neg, x).gd_rmse < 1e-12);
  CHECK(reconstruction_error(rot, x).amp_rmse < 1e-15);
  CHECK(reconstruction_error(rot, x).gd_rmse < 1e-12);

  const ComplexSignal shorter(make_grid(0.0, 1.0, 63).input_axis(), std::vector<cplx>(63));
  CHECK_THROWS_AS(reconstruction_error(shorter, x), std::invalid_argument);
}

TEST_CASE("reconstruction error: central window") {
  CHECK(central_window(100, 0.6) == std::pair<std::size_t, std::size_t>{20, 60});
  CHECK(central_window(128, 1.0) == std::pair<std::size_t, std::size_t>{0, 128});
  CHECK(central_window(5, 0.01).second == 1);
  CHECK_THROWS_AS(central_window(10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(central_window(10, 1.5), std::invalid_argument);

  // Errors outside the window are ignored.
  const auto g = make_grid(0.0, 1.0, 100);
  std::vector<cplx> a(100, 1.0), b(100, 1.0);
  for (std::size_t i = 0; i < 20; ++i) b[i] = 5.0;
  const ComplexSignal xa(g.input_axis(), a), xb(g.input_axis(), b);
  CHECK(reconstruction_error(xb, xa, 0.6).amp_rmse == 0.0);
  CHECK(reconstruction_error(xb, xa, 1.0).amp_rmse > 0.0);
}
