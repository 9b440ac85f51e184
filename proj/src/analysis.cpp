#include "asymarket/analysis.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>

#include "asymarket/agents.hpp"
#include "asymarket/kernels.hpp"

namespace asymarket {

std::vector<std::vector<double>> JacobianStructure::dense() const {
  const std::size_t n = diag.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, -s));
  for (std::size_t w = 0; w < n; ++w) m[w][w] -= diag[w];
  return m;
}

JacobianStructure jacobian(const MarketInstance& instance) {
  require_valid(instance);
  const std::size_t n = instance.n_outcomes();
  JacobianStructure out;
  out.s = 1.0 / instance.alpha + 1.0 / instance.beta;
  out.diag.resize(n);
  for (std::size_t w = 0; w < n; ++w)
    out.diag[w] = 1.0 / (instance.consumer_beliefs[w] * instance.beta) +
                  1.0 / (instance.producer_beliefs[w] * instance.alpha);
  return out;
}

namespace {

// Roots of f(mu) = 1 + s sum_k m_k / (d_k - mu) on (lo, hi). f is increasing
// between consecutive poles, so the sign at the midpoint is all bisection
// needs; the open endpoints are never evaluated.
double secular_root(double lo, double hi, double s, const std::vector<double>& d,
                    const std::vector<std::size_t>& mult) {
  auto f = [&](double mu) {
    double acc = 1.0;
    for (std::size_t k = 0; k < d.size(); ++k)
      acc += s * static_cast<double>(mult[k]) / (d[k] - mu);
    return acc;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> eigenvalues(const JacobianStructure& jac) {
  const std::size_t n = jac.size();
  if (n == 0) throw std::invalid_argument("eigenvalues: empty Jacobian");
  const double s = jac.s;
  if (!(s > 0.0)) throw std::logic_error("eigenvalues: rank-one weight must be positive");

  // Spectrum of M = diag(d) + s 11^T; J = -M.
  std::vector<double> d = jac.diag;
  std::sort(d.begin(), d.end());
  if (!(d.front() > 0.0)) throw std::logic_error("eigenvalues: diagonal must be positive");

  std::vector<double> uniq;
  std::vector<std::size_t> mult;
  for (double v : d) {
    if (!uniq.empty() && v == uniq.back())
      ++mult.back();
    else {
      uniq.push_back(v);
      mult.push_back(1);
    }
  }

  std::vector<double> mu;
  mu.reserve(n);
  for (std::size_t k = 0; k < uniq.size(); ++k)
    mu.insert(mu.end(), mult[k] - 1, uniq[k]);

  const std::size_t n_clusters = uniq.size();
  if (n_clusters == 1) {
    mu.push_back(uniq[0] + s * static_cast<double>(n));
  } else {
    const double top = uniq.back() + s * static_cast<double>(n);
    std::vector<double> roots(n_clusters);
#pragma omp parallel for schedule(static) if (n_clusters > 256)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(n_clusters); ++k) {
      const auto i = static_cast<std::size_t>(k);
      const double hi = (i + 1 < n_clusters) ? uniq[i + 1] : top;
      roots[i] = secular_root(uniq[i], hi, s, uniq, mult);
    }
    mu.insert(mu.end(), roots.begin(), roots.end());
  }

  for (double& v : mu) v = -v;
  std::sort(mu.begin(), mu.end());
  return mu;
}

std::vector<double> dense_symmetric_eigenvalues(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("dense_symmetric_eigenvalues: empty matrix");
  for (const auto& row : m)
    if (row.size() != n) throw std::invalid_argument("dense_symmetric_eigenvalues: not square");

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(m[i][j]));
  if (scale == 0.0) return std::vector<double>(n, 0.0);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += m[i][j] * m[i][j];
    if (off <= 1e-30 * scale * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(m[p][q]) <= 1e-300) continue;
        const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m[k][p];
          const double mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m[p][k];
          const double mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = m[i][i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

std::string to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::locally_stable: return "locally_stable";
    case StabilityVerdict::unstable: return "unstable";
    case StabilityVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

StabilityReport stability(const MarketInstance& instance) {
  StabilityReport report;
  report.eigenvalues = eigenvalues(jacobian(instance));
  report.min_eig = report.eigenvalues.front();
  report.max_eig = report.eigenvalues.back();

  double max_abs = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (double e : report.eigenvalues) {
    max_abs = std::max(max_abs, std::abs(e));
    min_abs = std::min(min_abs, std::abs(e));
  }
  report.ratio = min_abs > 0.0 ? max_abs / min_abs : std::numeric_limits<double>::infinity();

  if (std::abs(report.max_eig) <= 1e-12)
    report.verdict = StabilityVerdict::inconclusive;
  else if (report.max_eig < 0.0)
    report.verdict = StabilityVerdict::locally_stable;
  else
    report.verdict = StabilityVerdict::unstable;
  return report;
}

std::vector<double> demand_excess(const PriceVector& prices, const MarketInstance& instance) {
  if (prices.size() != instance.n_outcomes())
    throw std::invalid_argument("demand_excess: price vector length must equal outcomes");
  std::vector<double> z(prices.size());
  kernels::serial::demand_excess(instance, prices.lambda, z);
  return z;
}

namespace {

double inf_norm(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

PriceFieldResult price_field(const MarketInstance& instance, const std::vector<PriceVector>& grid,
                             double tau, const PriceVector& lambda0, std::size_t max_steps) {
  require_valid(instance);
  if (!(tau > 0.0)) throw std::invalid_argument("price_field: tau must be positive");
  const std::size_t n = instance.n_outcomes();

  PriceFieldResult out;
  out.samples.resize(grid.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t g = 0; g < static_cast<std::int64_t>(grid.size()); ++g) {
    const auto i = static_cast<std::size_t>(g);
    auto z = demand_excess(grid[i], instance);
    for (double& v : z) v *= tau;
    out.samples[i] = FieldSample{grid[i], std::move(z)};
  }

  if (lambda0.size() != n)
    throw std::invalid_argument("price_field: lambda0 length must equal outcomes");

  const double h = 0.01 / tau;
  std::vector<double> x = lambda0.lambda;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto eval = [&](const std::vector<double>& at, std::vector<double>& into) {
    kernels::serial::demand_excess(instance, at, into);
    for (double& v : into) v *= tau;
  };

  for (std::size_t step = 0; step < max_steps; ++step) {
    eval(x, k1);
    out.trajectory.push_back(FieldSample{PriceVector{x}, k1});
    if (inf_norm(k1) <= 1e-6 * tau) {
      out.trajectory_complete = true;
      break;
    }
    for (std::size_t w = 0; w < n; ++w) tmp[w] = x[w] + 0.5 * h * k1[w];
    eval(tmp, k2);
    for (std::size_t w = 0; w < n; ++w) tmp[w] = x[w] + 0.5 * h * k2[w];
    eval(tmp, k3);
    for (std::size_t w = 0; w < n; ++w) tmp[w] = x[w] + h * k3[w];
    eval(tmp, k4);
    bool finite = true;
    for (std::size_t w = 0; w < n; ++w) {
      x[w] += h / 6.0 * (k1[w] + 2.0 * k2[w] + 2.0 * k3[w] + k4[w]);
      finite = finite && std::isfinite(x[w]);
    }
    if (!finite) break;  // stiff blow-up; report the partial trajectory
  }
  return out;
}

RecoursePlan welfare_recourse(DayAheadDecisions dayahead, const MarketInstance& instance) {
  require_valid(instance);
  const std::size_t n = instance.n_outcomes();
  RecoursePlan plan;
  plan.r.resize(n);
  plan.l.resize(n);

  const double slack0 = dayahead.p - dayahead.d;
  for (std::size_t w = 0; w < n; ++w) {
    const BoxInterval o = instance.producer_set.recourse[w];
    const BoxInterval k = instance.consumer_set.recourse[w];
    const double base = slack0 + instance.outcomes[w];  // p + xi_w - d

    // Unconstrained optimum: zero-cost recourse and satiation consumption.
    const double r0 = response::clamp(0.0, o);
    const double l0 = response::clamp(instance.gamma_u / instance.beta, k);
    if (base + r0 - l0 >= 0.0) {
      plan.r[w] = r0;
      plan.l[w] = l0;
      continue;
    }

    // Balance binds: l = base + r, maximize u(base + r) - c(r) over the
    // r-interval compatible with both boxes.
    const double lo = std::max(o.lo, k.lo - base);
    const double hi = std::min(o.hi, k.hi - base);
    if (lo > hi)
      throw InfeasibleOutcome(
          "welfare_recourse: balance infeasible within boxes at outcome " + std::to_string(w), w);
    const double r_star =
        (instance.gamma_u - instance.beta * base) / (instance.alpha + instance.beta);
    plan.r[w] = std::clamp(r_star, lo, hi);
    plan.l[w] = base + plan.r[w];
  }
  return plan;
}

std::vector<double> welfare_per_outcome(DayAheadDecisions dayahead,
                                        const MarketInstance& instance) {
  const auto plan = welfare_recourse(dayahead, instance);
  const double stage1 = instance.utility(dayahead.d) - instance.cost(dayahead.p);
  std::vector<double> sw(instance.n_outcomes());
  for (std::size_t w = 0; w < sw.size(); ++w)
    sw[w] = stage1 + instance.utility(plan.l[w]) - instance.cost(plan.r[w]);
  return sw;
}

double expected_welfare(const std::vector<double>& welfare, const BeliefSet& beliefs) {
  if (welfare.size() != beliefs.size())
    throw std::invalid_argument("expected_welfare: length mismatch");
  std::vector<double> terms(welfare.size());
  for (std::size_t w = 0; w < welfare.size(); ++w) terms[w] = beliefs[w] * welfare[w];
  return kahan_sum(terms);
}

}  // namespace asymarket
