#pragma once

#include <span>

#include "asymarket/market.hpp"

namespace asymarket::kernels {

enum class Exec { serial, parallel };

// The per-outcome loops of the solver, in two builds with identical
// signatures: `serial` is the plain reference implementation kept for tests
// and benchmarking, `parallel` is the OpenMP version used by default.
//
// The parallel sum accumulates fixed-size blocks whose partition depends only
// on the input length and combines them in index order, so results are
// bitwise reproducible for any thread count (max-reductions are order
// independent already).

namespace serial {

double sum(std::span<const double> xs);

// One price-adjustment iteration: best responses to lambda_in, projected
// price step into lambda_out, dispatch written to (p, r, d, l), the incoming
// price sum to sum_lambda (the caller's divergence sentinel: projection and
// clamping can mask a poisoned iterate, the sum cannot). Returns the largest
// squared per-outcome imbalance. lambda_out may alias lambda_in.
double step(const MarketInstance& instance, std::span<const double> lambda_in, double rho,
            std::span<double> lambda_out, std::span<double> r, std::span<double> l, double& p,
            double& d, double& sum_lambda);

// Demand excess z_w at the unconstrained stationary responses.
void demand_excess(const MarketInstance& instance, std::span<const double> lambda,
                   std::span<double> z);

}  // namespace serial

namespace parallel {

double sum(std::span<const double> xs);

double step(const MarketInstance& instance, std::span<const double> lambda_in, double rho,
            std::span<double> lambda_out, std::span<double> r, std::span<double> l, double& p,
            double& d, double& sum_lambda);

void demand_excess(const MarketInstance& instance, std::span<const double> lambda,
                   std::span<double> z);

}  // namespace parallel

inline double step(Exec exec, const MarketInstance& instance, std::span<const double> lambda_in,
                   double rho, std::span<double> lambda_out, std::span<double> r,
                   std::span<double> l, double& p, double& d, double& sum_lambda) {
  return exec == Exec::serial
             ? serial::step(instance, lambda_in, rho, lambda_out, r, l, p, d, sum_lambda)
             : parallel::step(instance, lambda_in, rho, lambda_out, r, l, p, d, sum_lambda);
}

}  // namespace asymarket::kernels
