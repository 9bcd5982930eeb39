#include "autoconv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "autoconv/forward.hpp"

namespace autoconv {

SecondDiffOperator::SecondDiffOperator(std::size_t n, double dq) : n_(n), dq_(dq) {
  if (n < 2) throw std::invalid_argument("second-difference operator needs N >= 2");
  if (!(dq > 0.0)) throw std::invalid_argument("second-difference operator needs dq > 0");
}

Eigen::MatrixXd SecondDiffOperator::matrix() const {
  const auto n = static_cast<Eigen::Index>(n_);
  const double w = 1.0 / (dq_ * dq_);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    l(i, i) = 2.0 * w;
    if (i > 0) l(i, i - 1) = -w;
    if (i + 1 < n) l(i, i + 1) = -w;
  }
  return l;
}

Eigen::MatrixXd SecondDiffOperator::gram() const {
  const Eigen::MatrixXd l = matrix();
  return l.transpose() * l;
}

std::vector<cplx> SecondDiffOperator::apply(std::span<const cplx> x) const {
  if (x.size() != n_) throw std::invalid_argument("second-difference operator: length mismatch");
  const double w = 1.0 / (dq_ * dq_);
  std::vector<cplx> out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    cplx v = 2.0 * x[i];
    if (i > 0) v -= x[i - 1];
    if (i + 1 < n_) v -= x[i + 1];
    out[i] = w * v;
  }
  return out;
}

void LMConfig::validate() const {
  if (alpha_grid.empty()) throw std::invalid_argument("alpha_grid must not be empty");
  for (double a : alpha_grid)
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("alpha_grid entries must be positive and finite");
  if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end()))
    throw std::invalid_argument("alpha_grid must be sorted ascending");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (min_iterations < 1) throw std::invalid_argument("min_iterations must be >= 1");
  if (max_iterations < min_iterations)
    throw std::invalid_argument("max_iterations must be >= min_iterations");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
}

void IterationTrace::push(const IterationRecord& r) {
  if (!records.empty() && r.iteration <= records.back().iteration)
    throw std::invalid_argument("trace iterations must be strictly increasing");
  if (r.iteration < 1) throw std::invalid_argument("trace iterations start at 1");
  if (!(r.residual >= 0.0) || !(r.smoothness >= 0.0) || !(r.amplitude_deviation >= 0.0))
    throw std::invalid_argument("trace values must be non-negative");
  records.push_back(r);
}

IterationTrace max_normalized(const IterationTrace& trace) {
  double r = 0.0, s = 0.0, d = 0.0;
  for (const auto& rec : trace.records) {
    r = std::max(r, rec.residual);
    s = std::max(s, rec.smoothness);
    d = std::max(d, rec.amplitude_deviation);
  }
  auto scaled = [](double v, double m) { return m > 0.0 ? v / m : v; };
  IterationTrace out;
  for (const auto& rec : trace.records)
    out.records.push_back({rec.iteration, scaled(rec.residual, r), scaled(rec.smoothness, s),
                           scaled(rec.amplitude_deviation, d)});
  return out;
}

TurningPointDetector::TurningPointDetector(int patience, int min_iterations)
    : patience_(patience), min_iterations_(min_iterations) {
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
}

bool TurningPointDetector::observe(int iteration, double deviation) {
  ++records_;
  improved_ = records_ == 1 || deviation <= best_deviation_;
  if (improved_) {
    best_deviation_ = deviation;
    best_iteration_ = iteration;
    since_best_ = 0;
  } else {
    ++since_best_;
  }
  return records_ >= min_iterations_ && since_best_ >= patience_;
}

TurningPoint find_turning_point(const IterationTrace& trace, int patience, int min_iterations) {
  if (trace.empty()) throw std::invalid_argument("empty trace");
  TurningPointDetector detector(patience, min_iterations);
  TurningPoint tp;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& rec = trace.records[i];
    if (detector.observe(rec.iteration, rec.amplitude_deviation)) {
      tp.stopped_early = i + 1 < trace.size();
      break;
    }
  }
  tp.l_star = detector.best_iteration();
  tp.observed = tp.l_star != trace.records.back().iteration || tp.stopped_early;
  return tp;
}

InverseProblem::InverseProblem(const SampledGrid& g, KernelMatrix k, std::vector<cplx> y,
                               std::vector<double> a)
    : grid(g), kernel(std::move(k)), y_delta(std::move(y)), a_hat(std::move(a)) {
  if (y_delta.size() != grid.output_size())
    throw std::invalid_argument(fmt::format("y_delta has {} samples, expected {}", y_delta.size(),
                                            grid.output_size()));
  if (a_hat.size() != grid.n())
    throw std::invalid_argument(
        fmt::format("A_hat has {} samples, expected {}", a_hat.size(), grid.n()));
  if (static_cast<std::size_t>(kernel.rows()) != grid.output_size() ||
      static_cast<std::size_t>(kernel.cols()) != grid.n())
    throw std::invalid_argument("kernel matrix does not match the grid");
}

InverseProblem::InverseProblem(const SampledGrid& g, const Kernel& k, std::vector<cplx> y,
                               std::vector<double> a)
    : InverseProblem(g, kernel_matrix(k, g), std::move(y), std::move(a)) {}

namespace {

// Solves the LM system given the precomputed forward image of x.
std::vector<cplx> lm_update(const InverseProblem& problem, const Eigen::MatrixXd& penalty_gram,
                            std::span<const cplx> x, std::span<const cplx> fx, double alpha,
                            double gamma) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  const auto n = static_cast<Eigen::Index>(x.size());
  if (penalty_gram.rows() != n || penalty_gram.cols() != n)
    throw std::invalid_argument("penalty Gram matrix does not match the signal length");

  const double dq = problem.grid.dq();
  const Eigen::MatrixXcd jac = frechet_matrix(problem.kernel, x, dq);
  Eigen::VectorXcd residual(jac.rows());
  for (Eigen::Index m = 0; m < jac.rows(); ++m)
    residual[m] = problem.y_delta[static_cast<std::size_t>(m)] - fx[static_cast<std::size_t>(m)];

  Eigen::MatrixXcd system = alpha * penalty_gram.cast<cplx>();
  system.selfadjointView<Eigen::Lower>().rankUpdate(jac.adjoint());
  const Eigen::VectorXcd rhs = jac.adjoint() * residual;

  const Eigen::LLT<Eigen::MatrixXcd, Eigen::Lower> llt(system);
  if (llt.info() != Eigen::Success)
    throw IllConditionedSystem(
        fmt::format("LM system is not positive definite (alpha = {:.6g})", alpha));
  const double rcond = llt.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon()))
    throw IllConditionedSystem(fmt::format(
        "LM system condition estimate {:.3g} exceeds 1/eps (alpha = {:.6g})", 1.0 / rcond, alpha));
  const Eigen::VectorXcd step = llt.solve(rhs);

  std::vector<cplx> next(x.begin(), x.end());
  for (Eigen::Index i = 0; i < n; ++i) next[static_cast<std::size_t>(i)] += gamma * step[i];
  return next;
}

}  // namespace

std::vector<cplx> lm_step(const InverseProblem& problem, const Eigen::MatrixXd& penalty_gram,
                          std::span<const cplx> x, double alpha, double gamma) {
  const auto fx = apply_forward(problem.kernel, x, problem.grid.dq());
  return lm_update(problem, penalty_gram, x, fx, alpha, gamma);
}

std::vector<cplx> lm_step(std::span<const cplx> x, std::span<const cplx> y_delta,
                          const Kernel& kernel, const SecondDiffOperator& L, double alpha,
                          double gamma, const SampledGrid& grid) {
  if (x.size() != grid.n()) throw std::invalid_argument("x does not live on the grid");
  if (L.dimension() != grid.n()) throw std::invalid_argument("L does not match the grid");
  // A_hat is irrelevant for a single step; |x| fills the slot.
  const InverseProblem problem(grid, kernel, {y_delta.begin(), y_delta.end()},
                               abs_values(x));
  return lm_step(problem, L.gram(), x, alpha, gamma);
}

double amplitude_deviation_squared(std::span<const cplx> x, std::span<const double> a_hat,
                                   double dq) {
  if (x.size() != a_hat.size()) throw std::invalid_argument("x and A_hat lengths differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::abs(x[i]) - a_hat[i];
    sum += d * d;
  }
  return sum * dq;
}

LMRun run_lm(double alpha, const InverseProblem& problem, const SecondDiffOperator& L,
             const LMConfig& config) {
  if (L.dimension() != problem.grid.n()) throw std::invalid_argument("L does not match the grid");
  if (config.patience < 1 || config.min_iterations < 1 ||
      config.max_iterations < config.min_iterations)
    throw std::invalid_argument("invalid LM iteration limits");
  for (double a : problem.a_hat)
    if (!(a >= 0.0) && !(a < 0.0)) throw std::invalid_argument("A_hat contains NaN");

  const double dq = problem.grid.dq();
  const Eigen::MatrixXd gram = L.gram();

  LMRun run;
  run.alpha = alpha;
  std::vector<cplx> x(problem.a_hat.begin(), problem.a_hat.end());
  auto fx = apply_forward(problem.kernel, x, dq);
  TurningPointDetector detector(config.patience, config.min_iterations);
  bool stopped = false;

  for (int l = 1; l <= config.max_iterations; ++l) {
    try {
      x = lm_update(problem, gram, x, fx, alpha, config.gamma);
    } catch (const IllConditionedSystem& e) {
      if (l - 1 < config.min_iterations)
        throw SolverError(fmt::format("alpha = {:.6g}: step {} failed before min_iterations: {}",
                                      alpha, l, e.what()));
      run.note = fmt::format("stopped at step {}: {}", l, e.what());
      break;
    }
    fx = apply_forward(problem.kernel, x, dq);

    IterationRecord rec;
    rec.iteration = l;
    double res2 = 0.0;
    for (std::size_t m = 0; m < fx.size(); ++m) res2 += std::norm(fx[m] - problem.y_delta[m]);
    rec.residual = std::sqrt(res2 * dq);
    rec.smoothness = l2_norm(L.apply(x), dq);
    rec.amplitude_deviation = std::sqrt(amplitude_deviation_squared(x, problem.a_hat, dq));
    if (!std::isfinite(rec.residual) || !std::isfinite(rec.amplitude_deviation)) {
      if (l - 1 < config.min_iterations)
        throw SolverError(fmt::format("alpha = {:.6g}: iteration diverged at step {}", alpha, l));
      run.note = fmt::format("stopped at step {}: non-finite iterate", l);
      break;
    }
    run.trace.push(rec);

    const bool stop = detector.observe(l, rec.amplitude_deviation);
    if (detector.improved()) run.x = x;
    if (stop) {
      stopped = true;
      break;
    }
  }

  if (run.trace.empty()) throw SolverError("no LM iteration completed");
  run.l_star = detector.best_iteration();
  run.turning_point = stopped || run.l_star != run.trace.records.back().iteration;
  if (!run.turning_point && run.note.empty()) run.note = "no turning point observed";
  return run;
}

double argmin_alpha(const std::map<double, double>& deviations) {
  if (deviations.empty()) throw std::invalid_argument("no deviations to compare");
  auto best = deviations.begin();
  for (auto it = deviations.begin(); it != deviations.end(); ++it)
    if (it->second <= best->second) best = it;
  return best->first;
}

ReconstructionResult select_alpha(const InverseProblem& problem, const LMConfig& config) {
  config.validate();
  const SecondDiffOperator L(problem.grid.n(), problem.grid.dq());
  const auto count = static_cast<std::ptrdiff_t>(config.alpha_grid.size());
  std::vector<std::optional<LMRun>> runs(config.alpha_grid.size());
  std::vector<std::string> errors(config.alpha_grid.size());

  // Runs share only immutable inputs; nested kernels fall back to one thread.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const double alpha = config.alpha_grid[static_cast<std::size_t>(i)];
    try {
      runs[static_cast<std::size_t>(i)] = run_lm(alpha, problem, L, config);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }

  ReconstructionResult result;
  const double dq = problem.grid.dq();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const double alpha = config.alpha_grid[i];
    if (!runs[i]) {
      result.warnings.push_back(fmt::format("alpha = {:.6g} skipped: {}", alpha, errors[i]));
      continue;
    }
    const LMRun& run = *runs[i];
    if (!run.note.empty())
      result.warnings.push_back(fmt::format("alpha = {:.6g}: {}", alpha, run.note));
    result.traces[alpha] = run.trace;
    result.deviations_at_stop[alpha] = std::sqrt(amplitude_deviation_squared(run.x, problem.a_hat, dq));
    result.stop_indices[alpha] = run.l_star;
    result.turning_points[alpha] = run.turning_point;
  }
  if (result.deviations_at_stop.empty())
    throw SolverError("every alpha failed: " + (errors.empty() ? std::string{} : errors.front()));

  result.alpha_star = argmin_alpha(result.deviations_at_stop);
  const auto pos = std::find(config.alpha_grid.begin(), config.alpha_grid.end(), result.alpha_star);
  const LMRun& best = *runs[static_cast<std::size_t>(pos - config.alpha_grid.begin())];
  result.l_star = best.l_star;
  result.x_reconstructed = ComplexSignal(problem.grid.input_axis(), best.x);
  result.group_delay = group_delay(best.x, dq);
  return result;
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(fmt::format("{} must be positive and finite", name));
}

}  // namespace

double normalized_alpha(double alpha, double a_hat_max, double dq, double kernel_scale) {
  require_positive(alpha, "alpha");
  require_positive(a_hat_max, "A_hat_max");
  require_positive(dq, "dq");
  require_positive(kernel_scale, "kernel_scale");
  const double dq2 = dq * dq;
  return alpha * (a_hat_max * a_hat_max) / (dq2 * dq2) / (kernel_scale * kernel_scale);
}

double denormalized_alpha(double alpha_hat, double a_hat_max, double dq, double kernel_scale) {
  require_positive(alpha_hat, "alpha_hat");
  require_positive(a_hat_max, "A_hat_max");
  require_positive(dq, "dq");
  require_positive(kernel_scale, "kernel_scale");
  const double dq2 = dq * dq;
  return alpha_hat * (kernel_scale * kernel_scale) * (dq2 * dq2) / (a_hat_max * a_hat_max);
}

std::vector<double> group_delay(std::span<const cplx> x, double dq) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("group delay needs at least 2 samples");
  std::vector<double> increment(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) increment[i] = std::arg(x[i + 1] * std::conj(x[i]));
  std::vector<double> gd(n);
  gd[0] = increment[0] / dq;
  gd[n - 1] = increment[n - 2] / dq;
  for (std::size_t i = 1; i + 1 < n; ++i) gd[i] = (increment[i - 1] + increment[i]) / (2.0 * dq);
  return gd;
}

std::vector<double> group_delay(const ComplexSignal& x) { return group_delay(x.view(), x.axis.step); }

}  // namespace autoconv
