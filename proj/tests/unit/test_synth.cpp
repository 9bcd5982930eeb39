#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "autoconv/config.hpp"
#include "autoconv/forward.hpp"
#include "autoconv/synth.hpp"

using namespace autoconv;
using doctest::Approx;

namespace {

SampledGrid default_grid(std::size_t n = 128) {
  GridSettings gs;
  gs.n = n;
  return gs.make();
}

PulseSpec two_peak() {
  PulseSpec p;
  p.shape = PulseShape::TwoPeakSinusoidalPhase;
  return p;
}

}  // namespace

TEST_CASE("pulse: single peak has a flat zero phase at the centre") {
  const auto g = default_grid(129);
  const auto x = make_pulse(PulseSpec{}, g);
  const auto p = to_polar(x);
  const std::size_t mid = 64;
  CHECK(std::abs(p.phase[mid]) < 1e-15);
  const double slope = (p.phase[mid + 1] - p.phase[mid - 1]) / (2.0 * g.dq());
  CHECK(std::abs(slope) * g.dq() < 1e-4);
  CHECK(p.phase.front() == Approx(-std::numbers::pi).epsilon(1e-12));
  CHECK(p.phase.back() == Approx(std::numbers::pi).epsilon(1e-12));
  for (std::size_t i = 1; i < p.phase.size(); ++i) CHECK(p.phase[i] >= p.phase[i - 1]);
}

TEST_CASE("pulse: peak amplitude equals amplitude_max exactly") {
  for (auto spec : {PulseSpec{}, two_peak()}) {
    for (std::size_t n : {16, 128, 297}) {
      const auto x = make_pulse(spec, default_grid(n));
      const auto a = abs_values(x.view());
      CHECK(*std::max_element(a.begin(), a.end()) == Approx(1e-7).epsilon(1e-15));
    }
  }
}

TEST_CASE("pulse: two-peak shape with zero phase amplitude is real") {
  auto spec = two_peak();
  spec.phase_amplitude = 0.0;
  const auto x = make_pulse(spec, default_grid());
  for (const auto& z : x.values) {
    CHECK(z.imag() == 0.0);
    CHECK(z.real() > 0.0);
  }
}

TEST_CASE("pulse: invalid shapes are rejected") {
  PulseSpec p;
  p.width = 0.0;
  CHECK_THROWS_AS(make_pulse(p, default_grid()), std::invalid_argument);
  p = PulseSpec{};
  p.amplitude_max = -1.0;
  CHECK_THROWS_AS(make_pulse(p, default_grid()), std::invalid_argument);
  auto q = two_peak();
  q.width2 = 0.0;
  CHECK_THROWS_AS(make_pulse(q, default_grid()), std::invalid_argument);
}

TEST_CASE("fine grid: default ratio on N = 128") {
  CHECK(fine_point_count(128, {}) == 297);
  CHECK(shared_node_count(128, 297) == 2);
}

TEST_CASE("fine grid: integer multiples are rejected") {
  CHECK_THROWS_AS(fine_point_count(128, {2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(fine_point_count(128, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(fine_point_count(129, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(fine_point_count(128, {0, 1}), std::invalid_argument);
}

TEST_CASE("fine grid: only the endpoints coincide for every coarse size") {
  for (std::size_t n = 3; n <= 400; ++n) {
    const std::size_t nf = fine_point_count(n, {});
    CHECK(nf > n);
    CHECK(shared_node_count(n, nf) == 2);
    // Independent count with exact rationals: i/(n-1) == j/(nf-1).
    std::size_t shared = 0;
    for (std::size_t i = 0; i < n; ++i)
      if ((i * (nf - 1)) % (n - 1) == 0) ++shared;
    CHECK(shared == 2);
  }
}

TEST_CASE("simulate: noise-free data is the resampled fine forward map") {
  const auto g = default_grid(24);
  const Kernel k = Kernel::physical(reference_kernel_params());
  const auto m = simulate_measurement(two_peak(), k, g, NoiseSpec{0.0, 9});
  const std::size_t nf = fine_point_count(24, {});
  const auto fine = make_grid(g.q_min(), g.q_max(), nf);

  const auto xf = make_pulse(two_peak(), fine);
  const auto yf = oracle::autoconv(k, xf.values, fine);
  const auto pf = to_polar(yf);
  const auto b = resample_linear(pf.amplitude, fine.output_axis(), g.output_axis());
  const auto psi = resample_linear(pf.phase, fine.output_axis(), g.output_axis());
  const auto a = resample_linear(abs_values(xf.view()), fine.input_axis(), g.input_axis());

  REQUIRE(m.a_hat.size() == 24);
  REQUIRE(m.y_delta.size() == 47);
  for (std::size_t i = 0; i < 24; ++i) CHECK(m.a_hat[i] == Approx(a[i]).epsilon(1e-12));
  for (std::size_t j = 0; j < 47; ++j) {
    CHECK(std::abs(m.y_delta.values[j]) == Approx(b[j]).epsilon(1e-10));
    CHECK(std::abs(m.y_delta.values[j] - std::polar(b[j], psi[j])) <= 1e-9 * b[j]);
  }
  CHECK(m.fine_points == nf);
  CHECK(m.delta_percent == 0.0);
  CHECK(m.generator == kNoiseGenerator);
}

TEST_CASE("simulate: noise-free data stays close to the coarse forward map") {
  const auto g = default_grid();
  const Kernel k = Kernel::physical(reference_kernel_params());
  const auto m = simulate_measurement(PulseSpec{}, k, g, NoiseSpec{0.0, 1});
  const auto y = apply_forward(kernel_matrix(k, g), m.ground_truth.view(), g.dq());
  CHECK(oracle::rel_err(m.y_delta.values, y) < 0.05);
}

TEST_CASE("simulate: relative noise draws A, then B, then psi") {
  const auto g = default_grid(40);
  const Kernel k = Kernel::physical(reference_kernel_params());
  const auto clean = simulate_measurement(two_peak(), k, g, NoiseSpec{0.0, 0});
  const auto noisy = simulate_measurement(two_peak(), k, g, NoiseSpec{5.0, 77});

  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (std::size_t i = 0; i < 40; ++i)
    CHECK(noisy.a_hat[i] == clean.a_hat[i] * (1.0 + 0.05 * nd(rng)));
  std::vector<double> b(79), psi(79);
  for (auto& v : b) v = nd(rng);
  for (auto& v : psi) v = nd(rng);
  const auto pc = to_polar(clean.y_delta);
  for (std::size_t j = 0; j < 79; ++j) {
    const double bj = pc.amplitude[j] * (1.0 + 0.05 * b[j]);
    const double pj = pc.phase[j] * (1.0 + 0.05 * psi[j]);
    CHECK(std::abs(noisy.y_delta.values[j] - std::polar(bj, pj)) <= 1e-12 * bj);
  }
}

TEST_CASE("simulate: relative noise has the requested standard deviation") {
  const auto g = default_grid();
  const Kernel k = Kernel::physical(reference_kernel_params());
  const auto clean = simulate_measurement(PulseSpec{}, k, g, NoiseSpec{0.0, 0});
  std::vector<double> rel;
  for (std::uint64_t seed = 1; rel.size() < 20000; ++seed) {
    const auto noisy = simulate_measurement(PulseSpec{}, k, g, NoiseSpec{5.0, seed});
    for (std::size_t i = 0; i < g.n(); ++i) rel.push_back(noisy.a_hat[i] / clean.a_hat[i] - 1.0);
    for (std::size_t j = 0; j < g.output_size(); ++j)
      rel.push_back(std::abs(noisy.y_delta.values[j]) / std::abs(clean.y_delta.values[j]) - 1.0);
  }
  double mean = 0.0;
  for (double v : rel) mean += v;
  mean /= static_cast<double>(rel.size());
  double var = 0.0;
  for (double v : rel) var += (v - mean) * (v - mean);
  var /= static_cast<double>(rel.size() - 1);
  // Sample variance of n normals: relative spread sqrt(2/(n-1)); 4 sigma band.
  const double band = 4.0 * std::sqrt(2.0 / static_cast<double>(rel.size() - 1));
  CHECK(std::abs(var / 0.0025 - 1.0) < band);
  CHECK(std::abs(mean) < 4.0 * 0.05 / std::sqrt(static_cast<double>(rel.size())));
}

TEST_CASE("simulate: deterministic in the seed") {
  const auto g = default_grid(48);
  const Kernel k = Kernel::physical(reference_kernel_params());
  const auto a = simulate_measurement(two_peak(), k, g, NoiseSpec{5.0, 123});
  const auto b = simulate_measurement(two_peak(), k, g, NoiseSpec{5.0, 123});
  const auto c = simulate_measurement(two_peak(), k, g, NoiseSpec{5.0, 124});
  CHECK(a.a_hat == b.a_hat);
  CHECK(a.y_delta.values == b.y_delta.values);
  CHECK(a.a_hat != c.a_hat);
  CHECK(a.ground_truth.values == c.ground_truth.values);
}

TEST_CASE("simulate: negative noise level is rejected") {
  CHECK_THROWS_AS(simulate_measurement(PulseSpec{}, Kernel::constant(1.0), default_grid(16),
                                       NoiseSpec{-1.0, 0}),
                  std::invalid_argument);
}
