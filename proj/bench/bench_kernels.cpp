// Serial reference vs OpenMP kernels on the default physical setup.
//   bench_kernels --benchmark_filter=forward

#include <random>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "autoconv/config.hpp"
#include "autoconv/forward.hpp"
#include "autoconv/reference.hpp"
#include "autoconv/solver.hpp"

using namespace autoconv;

namespace {

struct Setup {
  SampledGrid grid;
  Kernel kernel;
  KernelMatrix table;
  std::vector<cplx> x;
  std::vector<cplx> h;

  explicit Setup(std::size_t n)
      : grid(2.0e15, 2.6e15, n), kernel(Kernel::physical(reference_kernel_params())),
        table(kernel_matrix(kernel, grid)), x(n), h(n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0.0, 1e-7);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = {nd(rng), nd(rng)};
      h[i] = {nd(rng), nd(rng)};
    }
  }
};

std::size_t size_of(const benchmark::State& s) { return static_cast<std::size_t>(s.range(0)); }

void use_threads(benchmark::State& s) {
  omp_set_num_threads(s.range(1) > 0 ? static_cast<int>(s.range(1)) : omp_get_num_procs());
}

void forward_reference(benchmark::State& s) {
  const Setup u(size_of(s));
  for (auto _ : s) benchmark::DoNotOptimize(reference::apply_forward(u.kernel, u.x, u.grid));
}

void forward_parallel(benchmark::State& s) {
  use_threads(s);
  const Setup u(size_of(s));
  for (auto _ : s) benchmark::DoNotOptimize(apply_forward(u.table, u.x, u.grid.dq()));
}

void kernel_table(benchmark::State& s) {
  use_threads(s);
  const Setup u(size_of(s));
  for (auto _ : s) benchmark::DoNotOptimize(kernel_matrix(u.kernel, u.grid));
}

void frechet_reference(benchmark::State& s) {
  const Setup u(size_of(s));
  for (auto _ : s) benchmark::DoNotOptimize(reference::frechet_matrix(u.kernel, u.x, u.grid));
}

void frechet_parallel(benchmark::State& s) {
  use_threads(s);
  const Setup u(size_of(s));
  for (auto _ : s) benchmark::DoNotOptimize(frechet_matrix(u.table, u.x, u.grid.dq()));
}

void frechet_apply_reference(benchmark::State& s) {
  const Setup u(size_of(s));
  for (auto _ : s) benchmark::DoNotOptimize(reference::frechet_apply(u.kernel, u.x, u.h, u.grid));
}

void frechet_apply_parallel(benchmark::State& s) {
  use_threads(s);
  const Setup u(size_of(s));
  for (auto _ : s) benchmark::DoNotOptimize(frechet_apply(u.table, u.x, u.h, u.grid.dq()));
}

void lm_step_parallel(benchmark::State& s) {
  use_threads(s);
  const Setup u(size_of(s));
  const auto y = apply_forward(u.table, u.h, u.grid.dq());
  const InverseProblem p(u.grid, u.table, y, std::vector<double>(u.grid.n(), 1e-7));
  const Eigen::MatrixXd gram = SecondDiffOperator(u.grid.n(), u.grid.dq()).gram();
  const double alpha = denormalized_alpha(10.0, 1e-7, u.grid.dq(), 1e28);
  for (auto _ : s) benchmark::DoNotOptimize(lm_step(p, gram, u.x, alpha, 1.0));
}

void serial_args(benchmark::internal::Benchmark* b) {
  for (int n : {64, 128, 256, 512}) b->Args({n, 1});
}

// Thread count 0 means all available cores.
void parallel_args(benchmark::internal::Benchmark* b) {
  for (int n : {64, 128, 256, 512})
    for (int t : {1, 0}) b->Args({n, t});
}

}  // namespace

BENCHMARK(forward_reference)->Apply(serial_args);
BENCHMARK(forward_parallel)->Apply(parallel_args);
BENCHMARK(kernel_table)->Apply(parallel_args);
BENCHMARK(frechet_reference)->Apply(serial_args);
BENCHMARK(frechet_parallel)->Apply(parallel_args);
BENCHMARK(frechet_apply_reference)->Apply(serial_args);
BENCHMARK(frechet_apply_parallel)->Apply(parallel_args);
BENCHMARK(lm_step_parallel)->Apply(parallel_args);

BENCHMARK_MAIN();
