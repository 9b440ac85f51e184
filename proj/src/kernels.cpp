#include "asymarket/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "asymarket/agents.hpp"

namespace asymarket::kernels {

namespace {

constexpr std::size_t kSumBlock = 2048;

struct StepInputs {
  const double* lambda;
  const double* xi;
  const double* pi_p;
  const double* pi_c;
  const BoxInterval* o_rec;
  const BoxInterval* k_rec;
};

inline double step_outcome(const StepInputs& in, const MarketInstance& inst, double p, double d,
                           double rho, std::size_t w, double& r_w, double& l_w, double& lambda_w) {
  r_w = response::clamp(response::producer_recourse(in.lambda[w], in.pi_p[w], inst.alpha),
                        in.o_rec[w]);
  l_w = response::clamp(
      response::consumer_recourse(in.lambda[w], in.pi_c[w], inst.gamma_u, inst.beta), in.k_rec[w]);
  const double imbalance = p + r_w + in.xi[w] - d - l_w;
  lambda_w = std::max(0.0, in.lambda[w] - rho * imbalance);
  return imbalance * imbalance;
}

inline StepInputs gather(const MarketInstance& inst, std::span<const double> lambda) {
  return StepInputs{lambda.data(),
                    inst.outcomes.data(),
                    inst.producer_beliefs.probs.data(),
                    inst.consumer_beliefs.probs.data(),
                    inst.producer_set.recourse.data(),
                    inst.consumer_set.recourse.data()};
}

}  // namespace

namespace serial {

double sum(std::span<const double> xs) {
  double total = 0.0;
  for (double x : xs) total += x;
  return total;
}

double step(const MarketInstance& instance, std::span<const double> lambda_in, double rho,
            std::span<double> lambda_out, std::span<double> r, std::span<double> l, double& p,
            double& d, double& sum_lambda) {
  const std::size_t n = lambda_in.size();
  sum_lambda = sum(lambda_in);
  p = response::clamp(response::producer_first_stage(sum_lambda, instance.alpha),
                      instance.producer_set.first_stage);
  d = response::clamp(response::consumer_first_stage(sum_lambda, instance.gamma_u, instance.beta),
                      instance.consumer_set.first_stage);
  const StepInputs in = gather(instance, lambda_in);
  double max_sq = 0.0;
  for (std::size_t w = 0; w < n; ++w)
    max_sq = std::max(max_sq, step_outcome(in, instance, p, d, rho, w, r[w], l[w], lambda_out[w]));
  return max_sq;
}

void demand_excess(const MarketInstance& instance, std::span<const double> lambda,
                   std::span<double> z) {
  const std::size_t n = lambda.size();
  const double sum_lambda = sum(lambda);
  const double p = response::producer_first_stage(sum_lambda, instance.alpha);
  const double d = response::consumer_first_stage(sum_lambda, instance.gamma_u, instance.beta);
  for (std::size_t w = 0; w < n; ++w) {
    const double r_w =
        response::producer_recourse(lambda[w], instance.producer_beliefs[w], instance.alpha);
    const double l_w = response::consumer_recourse(lambda[w], instance.consumer_beliefs[w],
                                                   instance.gamma_u, instance.beta);
    z[w] = d + l_w - p - r_w - instance.outcomes[w];
  }
}

}  // namespace serial

namespace parallel {

double sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n <= kSumBlock) return serial::sum(xs);
  const std::size_t n_blocks = (n + kSumBlock - 1) / kSumBlock;
  std::vector<double> partial(n_blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
    const std::size_t first = static_cast<std::size_t>(b) * kSumBlock;
    const std::size_t last = std::min(first + kSumBlock, n);
    double acc = 0.0;
    for (std::size_t i = first; i < last; ++i) acc += xs[i];
    partial[static_cast<std::size_t>(b)] = acc;
  }
  return serial::sum(partial);
}

double step(const MarketInstance& instance, std::span<const double> lambda_in, double rho,
            std::span<double> lambda_out, std::span<double> r, std::span<double> l, double& p,
            double& d, double& sum_lambda) {
  const std::size_t n = lambda_in.size();
  sum_lambda = sum(lambda_in);
  p = response::clamp(response::producer_first_stage(sum_lambda, instance.alpha),
                      instance.producer_set.first_stage);
  d = response::clamp(response::consumer_first_stage(sum_lambda, instance.gamma_u, instance.beta),
                      instance.consumer_set.first_stage);
  const StepInputs in = gather(instance, lambda_in);
  const double p_val = p;
  const double d_val = d;
  double max_sq = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_sq)
  for (std::int64_t w = 0; w < static_cast<std::int64_t>(n); ++w) {
    const auto i = static_cast<std::size_t>(w);
    max_sq = std::max(max_sq,
                      step_outcome(in, instance, p_val, d_val, rho, i, r[i], l[i], lambda_out[i]));
  }
  return max_sq;
}

void demand_excess(const MarketInstance& instance, std::span<const double> lambda,
                   std::span<double> z) {
  const std::size_t n = lambda.size();
  const double sum_lambda = sum(lambda);
  const double p = response::producer_first_stage(sum_lambda, instance.alpha);
  const double d = response::consumer_first_stage(sum_lambda, instance.gamma_u, instance.beta);
#pragma omp parallel for schedule(static)
  for (std::int64_t w = 0; w < static_cast<std::int64_t>(n); ++w) {
    const auto i = static_cast<std::size_t>(w);
    const double r_w =
        response::producer_recourse(lambda[i], instance.producer_beliefs[i], instance.alpha);
    const double l_w = response::consumer_recourse(lambda[i], instance.consumer_beliefs[i],
                                                   instance.gamma_u, instance.beta);
    z[i] = d + l_w - p - r_w - instance.outcomes[i];
  }
}

}  // namespace parallel

}  // namespace asymarket::kernels
