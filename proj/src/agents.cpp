#include "asymarket/agents.hpp"

#include <cmath>
#include <stdexcept>

namespace asymarket {

namespace {

void check_prices(const PriceVector& prices, const MarketInstance& instance, const char* who) {
  if (prices.size() != instance.n_outcomes())
    throw std::invalid_argument(std::string(who) + ": price vector length must equal outcomes");
}

}  // namespace

ProducerResponse producer_best_response(const PriceVector& prices, const MarketInstance& instance) {
  check_prices(prices, instance, "producer_best_response");
  const std::size_t n = instance.n_outcomes();
  const double sum_lambda = kahan_sum(prices.lambda);
  ProducerResponse out;
  out.p = response::clamp(response::producer_first_stage(sum_lambda, instance.alpha),
                          instance.producer_set.first_stage);
  out.r.resize(n);
  for (std::size_t w = 0; w < n; ++w)
    out.r[w] = response::clamp(
        response::producer_recourse(prices[w], instance.producer_beliefs[w], instance.alpha),
        instance.producer_set.recourse[w]);
  return out;
}

ConsumerResponse consumer_best_response(const PriceVector& prices, const MarketInstance& instance) {
  check_prices(prices, instance, "consumer_best_response");
  const std::size_t n = instance.n_outcomes();
  const double sum_lambda = kahan_sum(prices.lambda);
  ConsumerResponse out;
  out.d = response::clamp(
      response::consumer_first_stage(sum_lambda, instance.gamma_u, instance.beta),
      instance.consumer_set.first_stage);
  out.l.resize(n);
  for (std::size_t w = 0; w < n; ++w)
    out.l[w] = response::clamp(
        response::consumer_recourse(prices[w], instance.consumer_beliefs[w], instance.gamma_u,
                                    instance.beta),
        instance.consumer_set.recourse[w]);
  return out;
}

ProducerResponse producer_stationary_point(const PriceVector& prices,
                                           const MarketInstance& instance) {
  check_prices(prices, instance, "producer_stationary_point");
  const std::size_t n = instance.n_outcomes();
  const double sum_lambda = kahan_sum(prices.lambda);
  ProducerResponse out;
  out.p = response::producer_first_stage(sum_lambda, instance.alpha);
  out.r.resize(n);
  for (std::size_t w = 0; w < n; ++w)
    out.r[w] = response::producer_recourse(prices[w], instance.producer_beliefs[w], instance.alpha);
  return out;
}

ConsumerResponse consumer_stationary_point(const PriceVector& prices,
                                           const MarketInstance& instance) {
  check_prices(prices, instance, "consumer_stationary_point");
  const std::size_t n = instance.n_outcomes();
  const double sum_lambda = kahan_sum(prices.lambda);
  ConsumerResponse out;
  out.d = response::consumer_first_stage(sum_lambda, instance.gamma_u, instance.beta);
  out.l.resize(n);
  for (std::size_t w = 0; w < n; ++w)
    out.l[w] = response::consumer_recourse(prices[w], instance.consumer_beliefs[w],
                                           instance.gamma_u, instance.beta);
  return out;
}

PriceVector price_update(const PriceVector& prices, const DispatchSchedule& dispatch,
                         const MarketInstance& instance, double rho) {
  check_prices(prices, instance, "price_update");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("price_update: rho must be positive");
  const std::size_t n = instance.n_outcomes();
  if (dispatch.r.size() != n || dispatch.l.size() != n)
    throw std::invalid_argument("price_update: dispatch length must equal outcomes");
  PriceVector next;
  next.lambda.resize(n);
  for (std::size_t w = 0; w < n; ++w) {
    const double imbalance =
        dispatch.p + dispatch.r[w] + instance.outcomes[w] - dispatch.d - dispatch.l[w];
    next.lambda[w] = std::max(0.0, prices[w] - rho * imbalance);
  }
  return next;
}

}  // namespace asymarket
