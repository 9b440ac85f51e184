#pragma once

#include <algorithm>
#include <vector>

#include "asymarket/market.hpp"

namespace asymarket {

struct ProducerResponse {
  double p = 0.0;
  std::vector<double> r;
};

struct ConsumerResponse {
  double d = 0.0;
  std::vector<double> l;
};

namespace response {

// Closed-form stationary points of the two agent objectives. Both objectives
// are additively separable across (first-stage, per-outcome) coordinates, so
// clamping each coordinate to its interval is the exact box-constrained
// maximizer. Probabilities enter pre-multiplied; lambda_w / pi_w is never
// formed on its own.

inline double clamp(double x, const BoxInterval& iv) { return std::clamp(x, iv.lo, iv.hi); }

inline double producer_first_stage(double sum_lambda, double alpha) { return sum_lambda / alpha; }

inline double producer_recourse(double lambda_w, double pi_p_w, double alpha) {
  return lambda_w / (pi_p_w * alpha);
}

inline double consumer_first_stage(double sum_lambda, double gamma_u, double beta) {
  return (gamma_u - sum_lambda) / beta;
}

inline double consumer_recourse(double lambda_w, double pi_c_w, double gamma_u, double beta) {
  return (pi_c_w * gamma_u - lambda_w) / (pi_c_w * beta);
}

}  // namespace response

// Unique maximizer of the producer's expected profit over its box.
ProducerResponse producer_best_response(const PriceVector& prices, const MarketInstance& instance);

// Unique maximizer of the consumer's expected utility over its box.
ConsumerResponse consumer_best_response(const PriceVector& prices, const MarketInstance& instance);

// Unconstrained stationary points (no clamping); the closed form behind the
// demand-excess function and the interior equilibrium.
ProducerResponse producer_stationary_point(const PriceVector& prices,
                                           const MarketInstance& instance);
ConsumerResponse consumer_stationary_point(const PriceVector& prices,
                                           const MarketInstance& instance);

// Projected price step: lambda_w <- max{0, lambda_w - rho (p + r_w + xi_w - d - l_w)}.
PriceVector price_update(const PriceVector& prices, const DispatchSchedule& dispatch,
                         const MarketInstance& instance, double rho);

}  // namespace asymarket
