#include "autoconv/check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "autoconv/commands.hpp"
#include "autoconv/config.hpp"
#include "autoconv/forward.hpp"
#include "autoconv/reference.hpp"

namespace autoconv {

namespace {

std::vector<cplx> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& z : v) {
    const double re = normal(rng);
    z = {re, normal(rng)};
  }
  return v;
}

double norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

double rel_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::norm(a[i] - b[i]);
  const double ref = norm(b);
  return ref > 0.0 ? std::sqrt(d) / ref : std::sqrt(d);
}

CheckResult make(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value, tol, std::isfinite(value) && value <= tol, std::move(detail)};
}

struct KernelCase {
  std::string label;
  Kernel kernel;
  SampledGrid grid;
};

std::vector<KernelCase> kernel_cases(std::size_t n) {
  const GridSettings g;
  return {{"k1", Kernel::constant({1.0, 0.0}), SampledGrid(0.0, 1.0, n, 0.0)},
          {"physical", Kernel::physical(reference_kernel_params()),
           SampledGrid(g.q_min, g.q_max, n, g.q_cw)}};
}

void forward_checks(const CheckOptions& opt, std::mt19937_64& rng, std::vector<CheckResult>& out) {
  std::vector<std::size_t> sizes{2, 17, opt.n};
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  for (std::size_t n : sizes) {
    for (const auto& c : kernel_cases(n)) {
      const auto x = random_vector(n, rng);
      KernelMatrix k = kernel_matrix(c.kernel, c.grid);
      if (opt.corrupt_kernel_entry) {
        const auto r = k.rows() / 2;
        k(r, std::min<Eigen::Index>(r, k.cols() - 1)) *= 1.5;
      }
      const auto fast = apply_forward(k, x, c.grid.dq());
      const auto brute = reference::apply_forward(c.kernel, x, c.grid);
      out.push_back(make(fmt::format("forward_oracle/{}/N={}", c.label, n), rel_diff(fast, brute),
                         1e-12));

      const Eigen::MatrixXcd fm = forward_matrix(k, x, c.grid.dq());
      const Eigen::VectorXcd xv = Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
      const Eigen::VectorXcd via_matrix = fm * xv;
      out.push_back(make(fmt::format("forward_matrix/{}/N={}", c.label, n),
                         rel_diff({via_matrix.data(), static_cast<std::size_t>(via_matrix.size())},
                                  brute),
                         1e-12));
    }
  }
}

void derivative_checks(const CheckOptions& opt, std::mt19937_64& rng,
                       std::vector<CheckResult>& out) {
  const std::size_t n = opt.n;
  for (const auto& c : kernel_cases(n)) {
    const auto x0 = random_vector(n, rng);
    const auto h = random_vector(n, rng);
    const double dq = c.grid.dq();
    const KernelMatrix k = kernel_matrix(c.kernel, c.grid);
    const auto f0 = apply_forward(k, x0, dq);
    const auto jh = frechet_apply(k, x0, h, dq);

    const Eigen::MatrixXcd jm = frechet_matrix(k, x0, dq);
    const Eigen::VectorXcd hv = Eigen::Map<const Eigen::VectorXcd>(h.data(), h.size());
    const Eigen::VectorXcd jmh = jm * hv;
    out.push_back(make(fmt::format("jacobian_matrix/{}/N={}", c.label, n),
                       rel_diff({jmh.data(), static_cast<std::size_t>(jmh.size())}, jh), 1e-12));
    const auto jh_ref = reference::frechet_apply(c.kernel, x0, h, c.grid);
    out.push_back(
        make(fmt::format("derivative_oracle/{}/N={}", c.label, n), rel_diff(jh, jh_ref), 1e-12));

    if (c.kernel.is_constant()) {
      // F is quadratic: F(x0 + e h) - F(x0) - e F'(x0) h = e^2 F(h) exactly.
      const auto fh = apply_forward(k, h, dq);
      double worst = 0.0;
      for (double eps : {1.0, 0.25}) {
        std::vector<cplx> xp(n), lhs(f0.size()), rhs(f0.size());
        for (std::size_t i = 0; i < n; ++i) xp[i] = x0[i] + eps * h[i];
        const auto fp = apply_forward(k, xp, dq);
        for (std::size_t m = 0; m < f0.size(); ++m) {
          lhs[m] = fp[m] - f0[m] - eps * jh[m];
          rhs[m] = eps * eps * fh[m];
        }
        worst = std::max(worst, std::abs(norm(lhs) - norm(rhs)) / norm(rhs));
      }
      out.push_back(make(fmt::format("quadratic_identity/{}/N={}", c.label, n), worst, 1e-11));
    } else {
      const double eps = 1e-6;
      std::vector<cplx> xp(n), fd(f0.size());
      for (std::size_t i = 0; i < n; ++i) xp[i] = x0[i] + eps * h[i];
      const auto fp = apply_forward(k, xp, dq);
      for (std::size_t m = 0; m < f0.size(); ++m) fd[m] = (fp[m] - f0[m]) / eps;
      out.push_back(make(fmt::format("finite_difference/{}/N={}", c.label, n), rel_diff(fd, jh),
                         1e-5, "eps=1e-6"));
    }
  }
}

void ambiguity_checks(const CheckOptions& opt, std::mt19937_64& rng,
                      std::vector<CheckResult>& out) {
  for (const auto& c : kernel_cases(opt.n)) {
    const KernelMatrix k = kernel_matrix(c.kernel, c.grid);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      auto x = random_vector(opt.n, rng);
      const auto fp = apply_forward(k, x, c.grid.dq());
      for (auto& z : x) z = -z;
      const auto fm = apply_forward(k, x, c.grid.dq());
      worst = std::max(worst, rel_diff(fm, fp));
    }
    out.push_back(make(fmt::format("sign_ambiguity/{}/N={}", c.label, opt.n), worst, 1e-13));
  }

  const auto x = random_vector(opt.n, rng);
  const auto back = recompose(to_polar(x));
  out.push_back(make(fmt::format("polar_round_trip/N={}", opt.n), rel_diff(back, x), 1e-14));

  std::vector<cplx> neg(x), shifted(x);
  for (auto& z : neg) z = -z;
  for (auto& z : shifted) z *= std::polar(1.0, 0.7);
  const auto g = group_delay(x, 1.0);
  const auto gn = group_delay(neg, 1.0);
  const auto gs = group_delay(shifted, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max({worst, std::abs(g[i] - gn[i]), std::abs(g[i] - gs[i])});
  out.push_back(make("group_delay_invariance", worst, 1e-12));
}

void measurement_checks(const std::filesystem::path& dir, std::vector<CheckResult>& out) {
  try {
    const LoadedMeasurement m = load_measurement(dir);
    const std::size_t n = m.set.grid.n();
    out.push_back(make("measurement/a_hat_length",
                       std::abs(static_cast<double>(m.set.a_hat.size()) - static_cast<double>(n)),
                       0.0));
    out.push_back(make("measurement/y_delta_length",
                       std::abs(static_cast<double>(m.set.y_delta.size()) -
                                static_cast<double>(m.set.grid.output_size())),
                       0.0));
    double bad = 0.0;
    for (double a : m.set.a_hat)
      if (!std::isfinite(a) || a < 0.0) bad += 1.0;
    for (const auto& y : m.set.y_delta.values)
      if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) bad += 1.0;
    out.push_back(make("measurement/finite_nonnegative", bad, 0.0, "count of invalid samples"));
    if (m.has_truth) {
      const auto truth_misfit =
          sign_ambiguity_residual(m.set.ground_truth, m.set.y_delta, m.kernel, m.set.grid);
      const double ynorm = l2_norm(m.set.y_delta);
      const double rel = ynorm > 0.0 ? truth_misfit.plus / ynorm : truth_misfit.plus;
      // Resampling alone leaves a small misfit; noise adds about delta percent.
      const double tol = 0.05 + 3.0 * m.set.delta_percent / 100.0;
      out.push_back(make("measurement/truth_consistency", rel, tol,
                         fmt::format("delta={}%", m.set.delta_percent)));
    }
  } catch (const std::exception& e) {
    out.push_back({"measurement/load", 1.0, 0.0, false, e.what()});
  }
}

}  // namespace

std::vector<CheckResult> run_checks(const CheckOptions& options) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(options.seed);
  forward_checks(options, rng, out);
  derivative_checks(options, rng, out);
  ambiguity_checks(options, rng, out);
  if (options.measurement_dir) measurement_checks(*options.measurement_dir, out);
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::string s;
  for (const auto& r : results) {
    s += fmt::format("{} {} value={:.3e} tol={:.1e}", r.passed ? "PASS" : "FAIL", r.name, r.value,
                     r.tolerance);
    if (!r.detail.empty()) s += " " + r.detail;
    s += '\n';
  }
  return s;
}

}  // namespace autoconv
