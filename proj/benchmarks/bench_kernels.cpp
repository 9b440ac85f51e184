// Timings for the per-outcome kernels: serial reference vs OpenMP, plus
// point-level parallelism across a grid sweep. Run with --smoke for a
// seconds-long pass (used by the test suite to keep this target building).

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#include "asymarket/analysis.hpp"
#include "asymarket/config.hpp"
#include "asymarket/equilibrium.hpp"
#include "asymarket/experiments.hpp"
#include "asymarket/kernels.hpp"
#include "asymarket/market.hpp"

using namespace asymarket;

namespace {

MarketInstance synthetic_instance(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  std::vector<double> weights(n);
  for (auto& w : weights) w = unif(rng);
  MarketInstance inst;
  inst.alpha = 1.5;
  inst.beta = 0.3;
  inst.gamma_u = 5.0;
  inst.outcomes.resize(n);
  for (auto& xi : inst.outcomes) xi = 3.0 * unif(rng);
  inst.producer_beliefs = BeliefSet::normalized(weights);
  inst.consumer_beliefs = BeliefSet::uniform(n);
  inst.producer_set = BoxSet::cube(n);
  inst.consumer_set = BoxSet::cube(n);
  return inst;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = omp_get_wtime();
    fn();
    best = std::min(best, omp_get_wtime() - t0);
  }
  return best;
}

void bench_step(std::size_t n, int iters, int reps) {
  const auto inst = synthetic_instance(n, 42);
  std::vector<double> lambda(n, 0.0), next(n), r(n), l(n);
  double p = 0.0, d = 0.0;

  auto run = [&](kernels::Exec exec) {
    std::fill(lambda.begin(), lambda.end(), 0.0);
    double residual = 0.0, sum = 0.0;
    for (int it = 0; it < iters; ++it) {
      residual = kernels::step(exec, inst, lambda, 1e-5, next, r, l, p, d, sum);
      lambda.swap(next);
    }
    return residual;
  };

  volatile double sink = run(kernels::Exec::serial);  // warm + sanity
  const double t_serial = time_best_of(reps, [&] { sink = run(kernels::Exec::serial); });
  const double t_par = time_best_of(reps, [&] { sink = run(kernels::Exec::parallel); });
  (void)sink;

  const double m_outcomes = static_cast<double>(n) * iters / 1e6;
  std::printf("step        n=%-9zu serial %8.2f Mout/s   omp %8.2f Mout/s   speedup %.2fx\n", n,
              m_outcomes / t_serial, m_outcomes / t_par, t_serial / t_par);
}

void bench_eigen(std::size_t n, int reps) {
  const auto inst = synthetic_instance(n, 7);
  const auto jac = jacobian(inst);

  std::vector<double> eig;
  const double t = time_best_of(reps, [&] { eig = eigenvalues(jac); });
  std::printf("eigen       n=%-9zu secular %.3f s (omp over clusters), min %.3g max %.3g\n", n, t,
              eig.front(), eig.back());
}

void bench_grid(std::size_t grid, int reps) {
  RunConfig cfg;
  cfg.experiment.grid = grid;

  std::vector<GridRow> rows;
  const double t_par = time_best_of(reps, [&] { rows = run_grid2d(cfg); });

  const double t_serial = time_best_of(reps, [&] {
    const std::size_t n = grid;
    rows.assign(n * n, GridRow{});
    for (std::size_t idx = 0; idx < n * n; ++idx) {
      const double x = 0.01 + 0.98 * static_cast<double>(idx / n) / static_cast<double>(n - 1);
      const double y = 0.01 + 0.98 * static_cast<double>(idx % n) / static_cast<double>(n - 1);
      const auto inst = cfg.instance_over({1.0, 3.0}, BeliefSet{{x, 1.0 - x}},
                                          BeliefSet{{y, 1.0 - y}});
      const auto an = analytic_equilibrium(inst);
      rows[idx] = GridRow{x, y, an.prices[0], an.prices[1], day_ahead_price(an.prices),
                          an.interior};
      if (!an.interior) {
        SolverConfig solver;
        solver.rho = suggested_rho(inst);
        solver.epsilon = 1e-12;
        solver.exec = kernels::Exec::serial;
        const auto eq = tatonnement(inst, solver);
        rows[idx].lambda_l = eq.prices[0];
        rows[idx].lambda_h = eq.prices[1];
        rows[idx].lambda_da = day_ahead_price(eq.prices);
      }
    }
  });
  std::printf("grid2d      %zux%-7zu serial %.3f s          omp-points %.3f s   speedup %.2fx\n",
              grid, grid, t_serial, t_par, t_serial / t_par);
}

}  // namespace

int main(int argc, char** argv) {
  const bool smoke = argc > 1 && std::strcmp(argv[1], "--smoke") == 0;
  std::printf("threads: %d\n", omp_get_max_threads());

  if (smoke) {
    bench_step(1 << 12, 50, 2);
    bench_eigen(512, 2);
    bench_grid(9, 1);
    return 0;
  }

  for (std::size_t n : {std::size_t{1} << 14, std::size_t{1} << 17, std::size_t{1} << 20})
    bench_step(n, 20, 3);
  for (std::size_t n : {std::size_t{1000}, std::size_t{4000}}) bench_eigen(n, 3);
  bench_grid(49, 2);
  return 0;
}
