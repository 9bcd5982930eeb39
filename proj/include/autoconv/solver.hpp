#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "autoconv/kernel.hpp"
#include "autoconv/signal.hpp"

namespace autoconv {

/// Raised when the LM normal equations cannot be factorized reliably,
/// which usually means alpha is too small for the current linearization.
class IllConditionedSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Second-difference matrix (1/dq^2) tridiag(-1, 2, -1), N x N, with the
/// diagonal 2 kept in the corner rows. Positive definite.
class SecondDiffOperator {
 public:
  SecondDiffOperator(std::size_t n, double dq);

  std::size_t dimension() const { return n_; }
  double dq() const { return dq_; }

  Eigen::MatrixXd matrix() const;
  /// L^T L, the penalty Gram matrix.
  Eigen::MatrixXd gram() const;
  std::vector<cplx> apply(std::span<const cplx> x) const;

 private:
  std::size_t n_;
  double dq_;
};

struct LMConfig {
  std::vector<double> alpha_grid;
  double gamma = 1.0;
  int max_iterations = 300;
  int min_iterations = 5;
  int patience = 25;

  void validate() const;
};

/// One row of a Table-1 style report.
struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;             // ||F(x_l) - y_delta||
  double smoothness = 0.0;           // ||L x_l||
  double amplitude_deviation = 0.0;  // || |x_l| - A_hat ||
};

struct IterationTrace {
  std::vector<IterationRecord> records;

  void push(const IterationRecord& r);
  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

/// Each column divided by its maximum over the trace.
IterationTrace max_normalized(const IterationTrace& trace);

/// Online turning-point detection on the amplitude-deviation column.
///
/// Tracks the running minimum (ties go to the later iteration) and reports
/// that the iteration may stop once `patience` consecutive records brought
/// no new minimum and at least `min_iterations` records were seen.
class TurningPointDetector {
 public:
  TurningPointDetector(int patience, int min_iterations);

  /// Returns true when the iteration may stop after this record.
  bool observe(int iteration, double deviation);

  bool improved() const { return improved_; }
  int best_iteration() const { return best_iteration_; }
  double best_deviation() const { return best_deviation_; }
  int records() const { return records_; }

 private:
  int patience_;
  int min_iterations_;
  int records_ = 0;
  int since_best_ = 0;
  bool improved_ = false;
  int best_iteration_ = 0;
  double best_deviation_ = 0.0;
};

struct TurningPoint {
  int l_star = 0;
  bool observed = false;  // false when the minimum sits at the last record
  bool stopped_early = false;
};

/// Replays a recorded trace through the stopping logic.
TurningPoint find_turning_point(const IterationTrace& trace, int patience, int min_iterations);

/// Precomputed inputs of the discrete inverse problem.
struct InverseProblem {
  SampledGrid grid;
  KernelMatrix kernel;
  std::vector<cplx> y_delta;
  std::vector<double> a_hat;

  InverseProblem(const SampledGrid& g, KernelMatrix k, std::vector<cplx> y, std::vector<double> a);
  InverseProblem(const SampledGrid& g, const Kernel& k, std::vector<cplx> y, std::vector<double> a);
};

/// One LM update x + gamma (J^H J + alpha L^T L)^{-1} J^H (y - F(x)),
/// J = F'(x), solved with a dense Cholesky factorization.
std::vector<cplx> lm_step(const InverseProblem& problem, const Eigen::MatrixXd& penalty_gram,
                          std::span<const cplx> x, double alpha, double gamma);
std::vector<cplx> lm_step(std::span<const cplx> x, std::span<const cplx> y_delta,
                          const Kernel& kernel, const SecondDiffOperator& L, double alpha,
                          double gamma, const SampledGrid& grid);

struct LMRun {
  double alpha = 0.0;
  std::vector<cplx> x;  // iterate at l_star
  IterationTrace trace;
  int l_star = 0;
  bool turning_point = false;
  std::string note;
};

/// Fixed-alpha iteration from the zero-phase start x_0 = A_hat, stopped by
/// the amplitude-deviation turning point. Returns the argmin iterate.
LMRun run_lm(double alpha, const InverseProblem& problem, const SecondDiffOperator& L,
             const LMConfig& config);

/// sum (|x_n| - A_hat_n)^2 dq
double amplitude_deviation_squared(std::span<const cplx> x, std::span<const double> a_hat,
                                   double dq);

struct ReconstructionResult {
  double alpha_star = 0.0;
  int l_star = 0;
  ComplexSignal x_reconstructed;
  std::vector<double> group_delay;
  std::map<double, IterationTrace> traces;
  std::map<double, double> deviations_at_stop;  // || |x_l*| - A_hat || per alpha
  std::map<double, int> stop_indices;
  std::map<double, bool> turning_points;
  std::vector<std::string> warnings;
};

/// Runs every alpha of the grid (in parallel) and keeps the reconstruction
/// whose modulus best matches A_hat. Ties go to the largest alpha.
ReconstructionResult select_alpha(const InverseProblem& problem, const LMConfig& config);

/// argmin over a deviation map with the largest-alpha tie break.
double argmin_alpha(const std::map<double, double>& deviations);

/// alpha_hat = alpha * A_max^2 * dq^-4 * kernel_scale^-2
double normalized_alpha(double alpha, double a_hat_max, double dq, double kernel_scale);
double denormalized_alpha(double alpha_hat, double a_hat_max, double dq, double kernel_scale);

/// Derivative of the unwrapped phase: central differences inside, one-sided
/// at the ends. Phase increments are taken as arg(x_{n+1} conj(x_n)).
std::vector<double> group_delay(std::span<const cplx> x, double dq);
std::vector<double> group_delay(const ComplexSignal& x);

}  // namespace autoconv
