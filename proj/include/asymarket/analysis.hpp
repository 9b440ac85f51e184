#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymarket/beliefs.hpp"
#include "asymarket/market.hpp"

namespace asymarket {

// Jacobian of the demand-excess map, J = -(diag(d) + s 11^T) with
//   s   = 1/alpha + 1/beta,
//   d_w = 1/(pi_c_w beta) + 1/(pi_p_w alpha).
// Symmetric negative definite by construction; kept in (s, d) form and never
// densified on the hot path.
struct JacobianStructure {
  double s = 0.0;
  std::vector<double> diag;

  std::size_t size() const { return diag.size(); }

  // Dense realization for small sizes (tests, finite-difference checks).
  std::vector<std::vector<double>> dense() const;
};

JacobianStructure jacobian(const MarketInstance& instance);

// Exact real spectrum of J, ascending. Duplicate diagonal entries are
// deflated; the remaining eigenvalues are the roots of the secular equation
//   f(mu) = 1 + s sum_k m_k / (d_k - mu) = 0,
// one per interval between consecutive distinct d_k plus one above the
// largest, bracketed and bisected to full precision.
std::vector<double> eigenvalues(const JacobianStructure& jacobian);

// Cyclic Jacobi eigensolver for small dense symmetric matrices; the fallback
// route used to cross-check the secular solver in tests.
std::vector<double> dense_symmetric_eigenvalues(std::vector<std::vector<double>> m);

enum class StabilityVerdict { locally_stable, unstable, inconclusive };

std::string to_string(StabilityVerdict v);

struct StabilityReport {
  std::vector<double> eigenvalues;  // ascending
  double min_eig = 0.0;
  double max_eig = 0.0;
  double ratio = 1.0;  // max |eig| / min |eig|
  StabilityVerdict verdict = StabilityVerdict::inconclusive;
};

StabilityReport stability(const MarketInstance& instance);

// z_w = d + l_w - p - r_w - xi_w at the unconstrained stationary responses.
std::vector<double> demand_excess(const PriceVector& prices, const MarketInstance& instance);

struct FieldSample {
  PriceVector point;
  std::vector<double> velocity;  // tau * z at the point
};

struct PriceFieldResult {
  std::vector<FieldSample> samples;
  std::vector<FieldSample> trajectory;
  bool trajectory_complete = false;  // reached ||z||_inf <= 1e-6 before the step cap
};

// Velocity field of the price dynamics dl/dt = tau z(l) on the supplied grid,
// plus one trajectory integrated from lambda0 with fixed-step RK4
// (h = 0.01 / tau) until ||z||_inf <= 1e-6 or max_steps.
PriceFieldResult price_field(const MarketInstance& instance, const std::vector<PriceVector>& grid,
                             double tau, const PriceVector& lambda0,
                             std::size_t max_steps = 200000);

struct DayAheadDecisions {
  double p = 0.0;
  double d = 0.0;
};

struct InfeasibleOutcome : std::runtime_error {
  InfeasibleOutcome(const std::string& msg, std::size_t outcome_index)
      : std::runtime_error(msg), outcome(outcome_index) {}
  std::size_t outcome;
};

// Recourse used for ex-post welfare accounting: per outcome, the welfare
// optimal re-dispatch given fixed day-ahead decisions.
struct RecoursePlan {
  std::vector<double> r;
  std::vector<double> l;
};

RecoursePlan welfare_recourse(DayAheadDecisions dayahead, const MarketInstance& instance);

// SW_w = [u(d) - c(p)] + [u(l_w) - c(r_w)] with (r_w, l_w) from
// welfare_recourse. Throws InfeasibleOutcome naming the outcome when the
// balance cannot be met within the boxes.
std::vector<double> welfare_per_outcome(DayAheadDecisions dayahead,
                                        const MarketInstance& instance);

double expected_welfare(const std::vector<double>& welfare, const BeliefSet& beliefs);

}  // namespace asymarket
