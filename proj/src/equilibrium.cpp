#include "asymarket/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asymarket/agents.hpp"
#include "asymarket/analysis.hpp"

namespace asymarket {

double day_ahead_price(const PriceVector& prices) { return kahan_sum(prices.lambda); }

double suggested_rho(const MarketInstance& instance) {
  const auto jac = jacobian(instance);
  const double d_max = *std::max_element(jac.diag.begin(), jac.diag.end());
  return 1.0 / (d_max + jac.s * static_cast<double>(jac.size()));
}

namespace {

void check_config(const SolverConfig& config, std::size_t n) {
  if (!(config.rho > 0.0) || !std::isfinite(config.rho))
    throw std::invalid_argument("tatonnement: rho must be positive");
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon))
    throw std::invalid_argument("tatonnement: epsilon must be positive");
  if (config.nu_max < 1) throw std::invalid_argument("tatonnement: nu_max must be >= 1");
  if (!config.lambda0.lambda.empty()) {
    if (config.lambda0.size() != n)
      throw std::invalid_argument("tatonnement: lambda0 length must equal outcomes");
    for (double v : config.lambda0.lambda)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("tatonnement: lambda0 entries must be non-negative");
  }
}

}  // namespace

EquilibriumResult tatonnement(const MarketInstance& instance, const SolverConfig& config) {
  require_valid(instance);
  const std::size_t n = instance.n_outcomes();
  check_config(config, n);

  std::vector<double> lambda =
      config.lambda0.lambda.empty() ? std::vector<double>(n, 0.0) : config.lambda0.lambda;
  std::vector<double> lambda_next(n), r(n), l(n);
  double p = 0.0, d = 0.0;

  EquilibriumResult result;
  if (config.trace_enabled) result.trace.reserve(std::min<std::size_t>(config.nu_max, 1u << 20));

  double max_sq = std::numeric_limits<double>::infinity();
  double sum_lambda = 0.0;
  std::size_t nu = 0;
  for (nu = 1; nu <= config.nu_max; ++nu) {
    max_sq =
        kernels::step(config.exec, instance, lambda, config.rho, lambda_next, r, l, p, d,
                      sum_lambda);
    lambda.swap(lambda_next);
    if (!std::isfinite(max_sq) || !std::isfinite(sum_lambda))
      throw NumericError("tatonnement: non-finite iterate at iteration " + std::to_string(nu),
                         nu);
    if (config.trace_enabled)
      result.trace.push_back({nu, max_sq, kahan_sum(lambda)});
    if (max_sq <= config.epsilon) {
      result.converged = true;
      break;
    }
  }

  result.iterations = std::min(nu, config.nu_max);
  result.residual = max_sq;
  result.prices = PriceVector{std::move(lambda)};
  result.dispatch = DispatchSchedule{p, std::move(r), d, std::move(l)};
  return result;
}

AnalyticEquilibrium analytic_equilibrium(const MarketInstance& instance) {
  require_valid(instance);
  const std::size_t n = instance.n_outcomes();
  const auto jac = jacobian(instance);
  const double s = jac.s;

  std::vector<double> b(n);
  for (std::size_t w = 0; w < n; ++w)
    b[w] = 2.0 * instance.gamma_u / instance.beta - instance.outcomes[w];

  // Solve (diag(d) + s 11^T) lambda = b via Sherman-Morrison, then one
  // iterative-refinement pass to push the residual to rounding level.
  std::vector<double> inv_d(n), lambda(n);
  double q = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    inv_d[w] = 1.0 / jac.diag[w];
    q += inv_d[w];
  }
  auto solve_into = [&](const std::vector<double>& rhs, std::vector<double>& x) {
    double t = 0.0;
    for (std::size_t w = 0; w < n; ++w) t += rhs[w] * inv_d[w];
    const double shift = s * t / (1.0 + s * q);
    for (std::size_t w = 0; w < n; ++w) x[w] = (rhs[w] - shift) * inv_d[w];
  };
  solve_into(b, lambda);
  {
    std::vector<double> residual(n), correction(n);
    const double sum_lambda = kahan_sum(lambda);
    for (std::size_t w = 0; w < n; ++w)
      residual[w] = b[w] - (jac.diag[w] * lambda[w] + s * sum_lambda);
    solve_into(residual, correction);
    for (std::size_t w = 0; w < n; ++w) lambda[w] += correction[w];
  }

  AnalyticEquilibrium out;
  out.prices = PriceVector{std::move(lambda)};

  const auto producer = producer_stationary_point(out.prices, instance);
  const auto consumer = consumer_stationary_point(out.prices, instance);
  out.dispatch = DispatchSchedule{producer.p, producer.r, consumer.d, consumer.l};

  bool interior = true;
  for (double v : out.prices.lambda) interior = interior && v >= 0.0;
  auto strictly_inside = [](double x, const BoxInterval& iv) { return x > iv.lo && x < iv.hi; };
  interior = interior && strictly_inside(out.dispatch.p, instance.producer_set.first_stage);
  interior = interior && strictly_inside(out.dispatch.d, instance.consumer_set.first_stage);
  for (std::size_t w = 0; w < n && interior; ++w) {
    interior = strictly_inside(out.dispatch.r[w], instance.producer_set.recourse[w]) &&
               strictly_inside(out.dispatch.l[w], instance.consumer_set.recourse[w]);
  }
  out.interior = interior;
  return out;
}

double dispatch_welfare(const DispatchSchedule& dispatch, const BeliefSet& beliefs,
                        const MarketInstance& instance) {
  const std::size_t n = instance.n_outcomes();
  if (dispatch.r.size() != n || dispatch.l.size() != n || beliefs.size() != n)
    throw std::invalid_argument("dispatch_welfare: length mismatch");
  std::vector<double> terms(n);
  for (std::size_t w = 0; w < n; ++w)
    terms[w] = beliefs[w] * (instance.utility(dispatch.l[w]) - instance.cost(dispatch.r[w]));
  return instance.utility(dispatch.d) - instance.cost(dispatch.p) + kahan_sum(terms);
}

CentralizedResult centralized_clear(const MarketInstance& instance, const SolverConfig& config) {
  require_valid(instance);
  if (!instance.operator_beliefs)
    throw std::invalid_argument("centralized_clear: operator_beliefs required");

  MarketInstance common = instance;
  common.producer_beliefs = *instance.operator_beliefs;
  common.consumer_beliefs = *instance.operator_beliefs;

  const auto eq = tatonnement(common, config);
  if (!eq.converged)
    throw SolverError("centralized_clear: price adjustment did not converge (residual " +
                          std::to_string(eq.residual) + ")",
                      eq.residual, eq.iterations);

  CentralizedResult out;
  out.dispatch = eq.dispatch;
  out.duals = eq.prices;
  out.welfare = dispatch_welfare(eq.dispatch, *instance.operator_beliefs, instance);
  out.iterations = eq.iterations;
  out.residual = eq.residual;

  const auto analytic = analytic_equilibrium(common);
  if (analytic.interior) {
    double gap = 0.0;
    for (std::size_t w = 0; w < eq.prices.size(); ++w)
      gap = std::max(gap, std::abs(analytic.prices[w] - eq.prices[w]));
    out.analytic_gap = gap;
  }
  return out;
}

}  // namespace asymarket
