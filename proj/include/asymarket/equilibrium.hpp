#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "asymarket/kernels.hpp"
#include "asymarket/market.hpp"

namespace asymarket {

struct SolverConfig {
  double rho = 1e-5;               // price step size
  double epsilon = 1e-5;           // per-outcome squared-imbalance tolerance
  std::size_t nu_max = 1'000'000;  // iteration cap
  PriceVector lambda0;             // empty = all-zero start
  bool trace_enabled = false;
  kernels::Exec exec = kernels::Exec::parallel;
};

struct TracePoint {
  std::size_t iteration;
  double max_sq_imbalance;
  double day_ahead_price;
};

struct EquilibriumResult {
  PriceVector prices;
  DispatchSchedule dispatch;
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;  // max over outcomes of squared imbalance at exit
  std::vector<TracePoint> trace;
};

struct NumericError : std::runtime_error {
  NumericError(const std::string& msg, std::size_t at_iteration)
      : std::runtime_error(msg), iteration(at_iteration) {}
  std::size_t iteration;
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& msg, double last_residual, std::size_t after_iterations)
      : std::runtime_error(msg), residual(last_residual), iterations(after_iterations) {}
  double residual;
  std::size_t iterations;
};

// Price sum; the day-ahead price implied by stage price convergence.
double day_ahead_price(const PriceVector& prices);

// Step size guaranteed to contract: 1 / (max_w d_w + s n) bounds the largest
// eigenvalue of the (negated) demand-excess Jacobian from above.
double suggested_rho(const MarketInstance& instance);

// Distributed price adjustment: iterate best responses and the projected
// price step until every per-outcome squared imbalance is <= epsilon, or
// nu_max is reached (converged=false, not an error). Throws NumericError if
// an iterate stops being finite.
EquilibriumResult tatonnement(const MarketInstance& instance, const SolverConfig& config = {});

struct AnalyticEquilibrium {
  PriceVector prices;
  bool interior = false;       // prices >= 0 and implied dispatch strictly inside the boxes
  DispatchSchedule dispatch;   // unconstrained stationary responses at the prices
};

// Root of the demand-excess system z(lambda) = 0, solved in O(n) through the
// diagonal-plus-rank-one structure (Sherman-Morrison) with one refinement
// pass. Valid as an equilibrium certificate only when interior=true; callers
// fall back to tatonnement otherwise.
AnalyticEquilibrium analytic_equilibrium(const MarketInstance& instance);

// Expected social welfare of a dispatch under the given beliefs:
// u(d) - c(p) + sum_w pi_w [u(l_w) - c(r_w)].
double dispatch_welfare(const DispatchSchedule& dispatch, const BeliefSet& beliefs,
                        const MarketInstance& instance);

struct CentralizedResult {
  DispatchSchedule dispatch;
  PriceVector duals;
  double welfare = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  // Gap to the interior KKT solve, present when that oracle is applicable
  // (no box active at the analytic solution).
  std::optional<double> analytic_gap;
};

// Two-stage stochastic clearing under the operator's beliefs. Solved by
// running the price adjustment with every agent holding the operator
// distribution; the analytic interior solve cross-checks the duals when no
// bound is active. Throws SolverError on non-convergence.
CentralizedResult centralized_clear(const MarketInstance& instance,
                                    const SolverConfig& config = {});

}  // namespace asymarket
