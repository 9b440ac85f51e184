// Test-side oracles, kept independent of the library's solution paths: the
// agent objectives evaluated straight from their definitions, derivative-free
// maximizers, finite differences, a dense pivoted solver and the full KKT
// system of the balance-constrained welfare problem.
#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "asymarket/market.hpp"

namespace oracles {

using asymarket::BeliefSet;
using asymarket::BoxSet;
using asymarket::MarketInstance;
using asymarket::PriceVector;

// Expected producer profit at prices lambda (objective of the profit
// maximization, written from its definition).
inline double producer_objective(const MarketInstance& inst, const std::vector<double>& lambda,
                                 double p, const std::vector<double>& r) {
  double value = -0.5 * inst.alpha * p * p;
  for (std::size_t w = 0; w < lambda.size(); ++w) {
    const double pi = inst.producer_beliefs[w];
    value += pi * ((lambda[w] / pi) * (p + r[w]) - 0.5 * inst.alpha * r[w] * r[w]);
  }
  return value;
}

// Expected consumer utility at prices lambda.
inline double consumer_objective(const MarketInstance& inst, const std::vector<double>& lambda,
                                 double d, const std::vector<double>& l) {
  double value = inst.gamma_u * d - 0.5 * inst.beta * d * d;
  for (std::size_t w = 0; w < lambda.size(); ++w) {
    const double pi = inst.consumer_beliefs[w];
    value += pi * ((inst.gamma_u * l[w] - 0.5 * inst.beta * l[w] * l[w]) -
                   (lambda[w] / pi) * (d + l[w]));
  }
  return value;
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <typename F>
double golden_max(F&& f, double lo, double hi, int iters = 120) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// Derivative-free maximizer of the producer problem: the objective is
// additively separable, so each coordinate is maximized by golden-section
// search over its interval.
inline std::pair<double, std::vector<double>> producer_search(const MarketInstance& inst,
                                                              const std::vector<double>& lambda) {
  const std::size_t n = lambda.size();
  std::vector<double> r(n, 0.0);
  const auto& box = inst.producer_set;
  const double p = golden_max(
      [&](double x) { return producer_objective(inst, lambda, x, r); }, box.first_stage.lo,
      box.first_stage.hi);
  for (std::size_t w = 0; w < n; ++w) {
    auto g = [&](double x) {
      std::vector<double> rr = r;
      rr[w] = x;
      return producer_objective(inst, lambda, p, rr);
    };
    r[w] = golden_max(g, box.recourse[w].lo, box.recourse[w].hi);
  }
  return {p, r};
}

inline std::pair<double, std::vector<double>> consumer_search(const MarketInstance& inst,
                                                              const std::vector<double>& lambda) {
  const std::size_t n = lambda.size();
  std::vector<double> l(n, 0.0);
  const auto& box = inst.consumer_set;
  const double d = golden_max(
      [&](double x) { return consumer_objective(inst, lambda, x, l); }, box.first_stage.lo,
      box.first_stage.hi);
  for (std::size_t w = 0; w < n; ++w) {
    auto g = [&](double x) {
      std::vector<double> ll = l;
      ll[w] = x;
      return consumer_objective(inst, lambda, d, ll);
    };
    l[w] = golden_max(g, box.recourse[w].lo, box.recourse[w].hi);
  }
  return {d, l};
}

// Projected gradient ascent from a caller-chosen start; a second route to
// the box-constrained maximizers that shares nothing with the closed form.
template <typename Obj>
std::vector<double> projected_ascent(Obj&& objective, std::vector<double> x,
                                     const std::vector<double>& lo, const std::vector<double>& hi,
                                     double step, int iters) {
  const std::size_t n = x.size();
  const double h = 1e-6;
  for (int it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double g = (objective(xp) - objective(xm)) / (2.0 * h);
      x[i] = std::clamp(x[i] + step * g, lo[i], hi[i]);
    }
  }
  return x;
}

// Central finite difference of a scalar function of one coordinate.
template <typename F>
double central_diff(F&& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
    if (std::abs(a[piv][col]) < 1e-300) throw std::runtime_error("gauss_solve: singular matrix");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[i][k] * x[k];
    x[i] = acc / a[i][i];
  }
  return x;
}

// Interior KKT system of the balance-constrained welfare problem
//   max u(d) - c(p) + sum_w pi_c u(l_w) - sum_w pi_p c(r_w)
//   s.t. p + r_w + xi_w - d - l_w = 0,
// assembled densely. Unknowns: [p, r_0..r_{n-1}, d, l_0..l_{n-1}, y_0..y_{n-1}].
struct InteriorKkt {
  double p;
  std::vector<double> r;
  double d;
  std::vector<double> l;
  std::vector<double> duals;
};

inline InteriorKkt solve_interior_kkt(const MarketInstance& inst) {
  const std::size_t n = inst.n_outcomes();
  const std::size_t dim = 3 * n + 2;
  std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
  std::vector<double> b(dim, 0.0);
  const std::size_t ip = 0, ir = 1, id = n + 1, il = n + 2, iy = 2 * n + 2;

  a[ip][ip] = inst.alpha;  // alpha p - sum y = 0
  for (std::size_t w = 0; w < n; ++w) a[ip][iy + w] = -1.0;
  for (std::size_t w = 0; w < n; ++w) {  // pi_p alpha r_w - y_w = 0
    a[ir + w][ir + w] = inst.producer_beliefs[w] * inst.alpha;
    a[ir + w][iy + w] = -1.0;
  }
  a[id][id] = inst.beta;  // beta d + sum y = gamma
  for (std::size_t w = 0; w < n; ++w) a[id][iy + w] = 1.0;
  b[id] = inst.gamma_u;
  for (std::size_t w = 0; w < n; ++w) {  // pi_c beta l_w + y_w = pi_c gamma
    a[il + w][il + w] = inst.consumer_beliefs[w] * inst.beta;
    a[il + w][iy + w] = 1.0;
    b[il + w] = inst.consumer_beliefs[w] * inst.gamma_u;
  }
  for (std::size_t w = 0; w < n; ++w) {  // p + r_w - d - l_w = -xi_w
    a[iy + w][ip] = 1.0;
    a[iy + w][ir + w] = 1.0;
    a[iy + w][id] = -1.0;
    a[iy + w][il + w] = -1.0;
    b[iy + w] = -inst.outcomes[w];
  }

  const auto x = gauss_solve(std::move(a), std::move(b));
  InteriorKkt out;
  out.p = x[ip];
  out.r.assign(x.begin() + ir, x.begin() + ir + n);
  out.d = x[id];
  out.l.assign(x.begin() + il, x.begin() + il + n);
  out.duals.assign(x.begin() + iy, x.begin() + iy + n);
  return out;
}

// Cramer solve of the two-outcome interior price system
//   (d_l + s) x_l + s x_h = b_l,  s x_l + (d_h + s) x_h = b_h.
inline std::pair<double, double> cramer2(double s, double d_l, double d_h, double b_l,
                                         double b_h) {
  const double a11 = d_l + s, a12 = s, a21 = s, a22 = d_h + s;
  const double det = a11 * a22 - a12 * a21;
  return {(b_l * a22 - a12 * b_h) / det, (a11 * b_h - b_l * a21) / det};
}

// --- random instances --------------------------------------------------------

struct InstanceOptions {
  std::size_t min_outcomes = 2;
  std::size_t max_outcomes = 50;
  bool common_beliefs = false;
  bool dirichlet_beliefs = false;  // heavier-tailed simplex draws
  double alpha_lo = 0.5, alpha_hi = 5.0;
  double beta_lo = 0.5, beta_hi = 5.0;
  double box_hi = 500.0;
};

inline BeliefSet random_beliefs(std::mt19937_64& rng, std::size_t n, bool dirichlet) {
  std::vector<double> w(n);
  if (dirichlet) {
    std::exponential_distribution<double> exp1(1.0);
    for (auto& x : w) x = exp1(rng);
  } else {
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    for (auto& x : w) x = unif(rng);
  }
  return BeliefSet::normalized(std::move(w));
}

inline MarketInstance random_instance(std::mt19937_64& rng, const InstanceOptions& opt = {}) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return lo * std::exp(unit(rng) * std::log(hi / lo));
  };
  MarketInstance inst;
  inst.alpha = log_uniform(opt.alpha_lo, opt.alpha_hi);
  inst.beta = log_uniform(opt.beta_lo, opt.beta_hi);
  inst.gamma_u = 2.0 + 6.0 * unit(rng);
  std::uniform_int_distribution<std::size_t> count(opt.min_outcomes, opt.max_outcomes);
  const std::size_t n = count(rng);
  inst.outcomes.resize(n);
  const double xi_scale = 0.4 * inst.gamma_u / inst.beta;
  for (auto& xi : inst.outcomes) xi = xi_scale * unit(rng);
  inst.producer_beliefs = random_beliefs(rng, n, opt.dirichlet_beliefs);
  inst.consumer_beliefs =
      opt.common_beliefs ? inst.producer_beliefs : random_beliefs(rng, n, opt.dirichlet_beliefs);
  if (opt.common_beliefs) inst.operator_beliefs = inst.producer_beliefs;
  inst.producer_set = BoxSet::cube(n, 0.0, opt.box_hi);
  inst.consumer_set = BoxSet::cube(n, 0.0, opt.box_hi);
  return inst;
}

// The two-outcome setup used throughout: quadratic cost 1.5, curvature 0.3,
// linear utility 5, outcomes (1, 3), uniform beliefs.
inline MarketInstance reference_two_outcome() {
  MarketInstance inst;
  inst.alpha = 1.5;
  inst.beta = 0.3;
  inst.gamma_u = 5.0;
  inst.outcomes = {1.0, 3.0};
  inst.producer_beliefs = BeliefSet::uniform(2);
  inst.consumer_beliefs = BeliefSet::uniform(2);
  inst.operator_beliefs = BeliefSet::uniform(2);
  inst.producer_set = BoxSet::cube(2);
  inst.consumer_set = BoxSet::cube(2);
  return inst;
}

}  // namespace oracles
