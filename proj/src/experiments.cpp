#include "asymarket/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace asymarket {

namespace {

std::vector<LabeledTarget> make_family(Family family, std::initializer_list<double> targets) {
  // targets ordered 3-up, 2-up, 1-up, 1-down, 2-down, 3-down
  const char* stem = family == Family::mean ? "mu" : "sigma";
  auto it = targets.begin();
  std::vector<LabeledTarget> out;
  for (int k = 3; k >= 1; --k)
    out.push_back({std::string(stem) + std::to_string(k) + "_up", family, false, *it++});
  out.push_back({"R", family, true, 0.0});
  for (int k = 1; k <= 3; ++k)
    out.push_back({std::string(stem) + std::to_string(k) + "_dn", family, false, *it++});
  return out;
}

}  // namespace

const std::vector<LabeledTarget>& family_targets(Family family) {
  static const std::vector<LabeledTarget> mean_family =
      make_family(Family::mean, {2.02, 1.79, 1.65, 1.34, 1.22, 1.07});
  static const std::vector<LabeledTarget> variance_family =
      make_family(Family::variance, {1.62, 0.92, 0.54, 0.10, 0.04, 0.02});
  return family == Family::mean ? mean_family : variance_family;
}

const LabeledTarget* find_label(const std::string& label) {
  for (Family f : {Family::mean, Family::variance})
    for (const auto& t : family_targets(f))
      if (t.label == label) return &t;
  return nullptr;
}

ResolvedDistribution resolve_distribution(const LabeledTarget& target, const SampleSet& samples) {
  ResolvedDistribution out;
  out.spec = target;
  if (target.is_reference) {
    out.params = WeightingParams{1.0, 1.0};
    out.beliefs = BeliefSet::uniform(samples.size());
    out.moments = weighted_stats(samples, out.beliefs);
    return out;
  }
  const auto moment = target.family == Family::mean ? MomentTarget::mean(target.target)
                                                    : MomentTarget::variance(target.target);
  try {
    const auto cal = calibrate(samples, moment);
    out.params = cal.params;
    out.moments = cal.achieved;
  } catch (const CalibrationError& e) {
    out.calibrated = false;
    out.note = e.what();
    out.params = e.best;
    out.moments = e.achieved;
  }
  out.beliefs = discretize(samples, out.params);
  return out;
}

DayAheadDecisions solve_dayahead(const MarketInstance& instance, const SolverConfig& base) {
  const auto analytic = analytic_equilibrium(instance);
  if (analytic.interior) return {analytic.dispatch.p, analytic.dispatch.d};
  SolverConfig cfg = base;
  cfg.rho = suggested_rho(instance);
  cfg.epsilon = std::min(base.epsilon, 1e-12);
  cfg.exec = kernels::Exec::serial;
  const auto eq = tatonnement(instance, cfg);
  return {eq.dispatch.p, eq.dispatch.d};
}

namespace {

struct LabelRun {
  ResolvedDistribution dist;
  EquilibriumResult eq;
  StabilityReport report;
};

// Solve all labels of one family against the uniform-reference consumer.
std::vector<LabelRun> run_labels(const std::vector<LabeledTarget>& labels, const RunConfig& cfg) {
  const auto samples =
      sample_reference(cfg.sampling.count, cfg.sampling.mean, cfg.sampling.variance,
                       cfg.sampling.seed);
  const auto consumer = BeliefSet::uniform(samples.size());

  std::vector<LabelRun> runs(labels.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(labels.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    LabelRun run;
    run.dist = resolve_distribution(labels[k], samples);
    const auto instance = cfg.instance_over(samples.values, run.dist.beliefs, consumer);
    SolverConfig solver = cfg.solver;
    solver.exec = kernels::Exec::serial;  // rows parallelize, each solve stays serial
    run.eq = tatonnement(instance, solver);
    run.report = stability(instance);
    runs[k] = std::move(run);
  }
  return runs;
}

}  // namespace

std::vector<FamilyRow> run_family_sweep(Family family, const RunConfig& cfg) {
  const auto& labels = family_targets(family);
  auto runs = run_labels(labels, cfg);
  std::vector<FamilyRow> rows;
  rows.reserve(runs.size());
  for (auto& run : runs) {
    FamilyRow row;
    row.label = run.dist.spec.label;
    row.delta = run.dist.params.delta;
    row.gamma_w = run.dist.params.gamma_w;
    row.mean = run.dist.moments.mean;
    row.variance = run.dist.moments.variance;
    row.day_ahead_price = day_ahead_price(run.eq.prices);
    row.p = run.eq.dispatch.p;
    row.d = run.eq.dispatch.d;
    row.mismatch = run.eq.dispatch.d - run.eq.dispatch.p;
    row.iterations = run.eq.iterations;
    row.eig_ratio = run.report.ratio;
    row.converged = run.eq.converged;
    row.note = run.dist.note;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<GridRow> run_grid2d(const RunConfig& cfg) {
  std::vector<double> outcomes = cfg.outcomes.value_or(std::vector<double>{1.0, 3.0});
  if (outcomes.size() != 2)
    throw std::invalid_argument("run_grid2d: a two-outcome instance is required");
  const std::size_t n = std::max<std::size_t>(cfg.experiment.grid, 2);
  auto level = [n](std::size_t i) {
    return 0.01 + 0.98 * static_cast<double>(i) / static_cast<double>(n - 1);
  };

  std::vector<GridRow> rows(n * n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t flat = 0; flat < static_cast<std::int64_t>(n * n); ++flat) {
    const auto idx = static_cast<std::size_t>(flat);
    const double pi_p_l = level(idx / n);
    const double pi_c_l = level(idx % n);
    const auto instance =
        cfg.instance_over(outcomes, BeliefSet{{pi_p_l, 1.0 - pi_p_l}},
                          BeliefSet{{pi_c_l, 1.0 - pi_c_l}});
    GridRow row;
    row.pi_p_l = pi_p_l;
    row.pi_c_l = pi_c_l;
    const auto analytic = analytic_equilibrium(instance);
    row.interior = analytic.interior;
    PriceVector prices = analytic.prices;
    if (!analytic.interior) {
      SolverConfig solver = cfg.solver;
      solver.rho = suggested_rho(instance);
      solver.epsilon = std::min(cfg.solver.epsilon, 1e-12);
      solver.exec = kernels::Exec::serial;
      prices = tatonnement(instance, solver).prices;
    }
    row.lambda_l = prices[0];
    row.lambda_h = prices[1];
    row.lambda_da = day_ahead_price(prices);
    rows[idx] = row;
  }
  return rows;
}

std::vector<StabilityRow> run_stability_table(const RunConfig& cfg,
                                              std::vector<std::vector<double>>* spectra) {
  std::vector<StabilityRow> rows;
  if (spectra) spectra->clear();
  for (Family family : {Family::mean, Family::variance}) {
    auto runs = run_labels(family_targets(family), cfg);
    for (auto& run : runs) {
      StabilityRow row;
      row.family = family == Family::mean ? "mu" : "sigma";
      row.label = run.dist.spec.label;
      row.delta = run.dist.params.delta;
      row.gamma_w = run.dist.params.gamma_w;
      row.iterations = run.eq.iterations;
      row.converged = run.eq.converged;
      row.eig_ratio = run.report.ratio;
      row.verdict = to_string(run.report.verdict);
      rows.push_back(std::move(row));
      if (spectra) spectra->push_back(std::move(run.report.eigenvalues));
    }
  }
  return rows;
}

std::vector<WelfareRow> run_welfare(const RunConfig& cfg) {
  const LabeledTarget* target = find_label(cfg.experiment.comparison);
  if (!target)
    throw std::invalid_argument("run_welfare: unknown comparison label \"" +
                                cfg.experiment.comparison + "\"");

  const auto samples = sample_reference(cfg.sampling.count, cfg.sampling.mean,
                                        cfg.sampling.variance, cfg.sampling.seed);
  const auto reference = BeliefSet::uniform(samples.size());

  const auto symmetric_instance = cfg.instance_over(samples.values, reference, reference);
  const auto symmetric = solve_dayahead(symmetric_instance, cfg.solver);
  const auto sw_reference = welfare_per_outcome(symmetric, symmetric_instance);

  const auto dist = resolve_distribution(*target, samples);
  const auto asymmetric_instance = cfg.instance_over(samples.values, dist.beliefs, reference);
  const auto asymmetric = solve_dayahead(asymmetric_instance, cfg.solver);
  const auto sw_asymmetric = welfare_per_outcome(asymmetric, asymmetric_instance);

  std::vector<WelfareRow> rows(samples.size());
  for (std::size_t w = 0; w < samples.size(); ++w) {
    rows[w] = WelfareRow{w + 1, samples.values[w], sw_reference[w], sw_asymmetric[w],
                         sw_reference[w] - sw_asymmetric[w]};
  }
  return rows;
}

std::vector<FieldRun> run_field(const RunConfig& cfg) {
  std::vector<double> outcomes = cfg.outcomes.value_or(std::vector<double>{1.0, 3.0});
  if (outcomes.size() != 2)
    throw std::invalid_argument("run_field: a two-outcome instance is required");

  const struct {
    const char* name;
    double pi_p_l, pi_c_l;
  } presets[] = {{"symmetric", 0.5, 0.5}, {"asymmetric", 0.99, 0.5}};

  std::vector<FieldRun> out;
  for (const auto& preset : presets) {
    const auto instance =
        cfg.instance_over(outcomes, BeliefSet{{preset.pi_p_l, 1.0 - preset.pi_p_l}},
                          BeliefSet{{preset.pi_c_l, 1.0 - preset.pi_c_l}});
    FieldRun run;
    run.preset = preset.name;
    run.pi_p_l = preset.pi_p_l;
    run.pi_c_l = preset.pi_c_l;

    // The plotted dynamics follow the unconstrained demand excess, so the
    // grid centers on its root (the analytic price vector) even when that
    // point is not a box-interior certificate.
    run.equilibrium = analytic_equilibrium(instance).prices;

    const std::size_t pts = std::max<std::size_t>(cfg.experiment.field_points, 2);
    const double extent = cfg.experiment.field_extent;
    std::vector<PriceVector> grid;
    grid.reserve(pts * pts);
    auto axis = [&](double center, std::size_t i) {
      const double lo = std::max(0.0, center - extent);
      const double hi = center + extent;
      return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(pts - 1);
    };
    for (std::size_t i = 0; i < pts; ++i)
      for (std::size_t j = 0; j < pts; ++j)
        grid.push_back(PriceVector{{axis(run.equilibrium[0], i), axis(run.equilibrium[1], j)}});

    PriceVector lambda0 = cfg.solver.lambda0.lambda.empty() ? PriceVector::zeros(2)
                                                            : cfg.solver.lambda0;
    auto field = price_field(instance, grid, cfg.experiment.tau, lambda0);
    run.samples = std::move(field.samples);
    run.trajectory = std::move(field.trajectory);
    run.trajectory_complete = field.trajectory_complete;
    out.push_back(std::move(run));
  }
  return out;
}

std::vector<DistributionRow> run_distributions(const RunConfig& cfg) {
  const auto samples = sample_reference(cfg.sampling.count, cfg.sampling.mean,
                                        cfg.sampling.variance, cfg.sampling.seed);
  std::vector<DistributionRow> rows;
  for (Family family : {Family::mean, Family::variance}) {
    for (const auto& target : family_targets(family)) {
      const auto dist = resolve_distribution(target, samples);
      rows.push_back({dist.spec.label, dist.params.delta, dist.params.gamma_w, dist.moments.mean,
                      dist.moments.variance});
    }
  }
  return rows;
}

// --- CSV rendering ----------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<FamilyRow>& rows) {
  std::ostringstream out;
  out << "label,delta,gamma_w,mean,variance,day_ahead_price,p,d,mismatch,iterations,eig_ratio,"
         "converged\n";
  for (const auto& r : rows)
    out << r.label << ',' << fmt(r.delta) << ',' << fmt(r.gamma_w) << ',' << fmt(r.mean) << ','
        << fmt(r.variance) << ',' << fmt(r.day_ahead_price) << ',' << fmt(r.p) << ',' << fmt(r.d)
        << ',' << fmt(r.mismatch) << ',' << r.iterations << ',' << fmt(r.eig_ratio) << ','
        << (r.converged ? "true" : "false") << '\n';
  return out.str();
}

std::string to_csv(const std::vector<GridRow>& rows) {
  std::ostringstream out;
  out << "pi_p_l,pi_c_l,lambda_l,lambda_h,lambda_da,interior\n";
  for (const auto& r : rows)
    out << fmt(r.pi_p_l) << ',' << fmt(r.pi_c_l) << ',' << fmt(r.lambda_l) << ','
        << fmt(r.lambda_h) << ',' << fmt(r.lambda_da) << ',' << (r.interior ? "true" : "false")
        << '\n';
  return out.str();
}

std::string to_csv(const std::vector<StabilityRow>& rows) {
  std::ostringstream out;
  out << "family,label,delta,gamma_w,iterations,converged,eig_ratio,verdict\n";
  for (const auto& r : rows)
    out << r.family << ',' << r.label << ',' << fmt(r.delta) << ',' << fmt(r.gamma_w) << ','
        << r.iterations << ',' << (r.converged ? "true" : "false") << ',' << fmt(r.eig_ratio)
        << ',' << r.verdict << '\n';
  return out.str();
}

std::string to_csv(const std::vector<WelfareRow>& rows) {
  std::ostringstream out;
  out << "outcome_rank,xi,sw_reference,sw_asymmetric,loss\n";
  for (const auto& r : rows)
    out << r.outcome_rank << ',' << fmt(r.xi) << ',' << fmt(r.sw_reference) << ','
        << fmt(r.sw_asymmetric) << ',' << fmt(r.loss) << '\n';
  return out.str();
}

std::string field_to_csv(const std::vector<FieldSample>& samples) {
  std::ostringstream out;
  out << "lambda_l,lambda_h,v_l,v_h\n";
  for (const auto& s : samples)
    out << fmt(s.point[0]) << ',' << fmt(s.point[1]) << ',' << fmt(s.velocity[0]) << ','
        << fmt(s.velocity[1]) << '\n';
  return out.str();
}

std::string to_csv(const std::vector<DistributionRow>& rows) {
  std::ostringstream out;
  out << "label,delta,gamma_w,mean,variance\n";
  for (const auto& r : rows)
    out << r.label << ',' << fmt(r.delta) << ',' << fmt(r.gamma_w) << ',' << fmt(r.mean) << ','
        << fmt(r.variance) << '\n';
  return out.str();
}

std::string spectrum_to_csv(const std::vector<double>& eigenvalues) {
  std::ostringstream out;
  out << "index,eigenvalue\n";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    out << i << ',' << fmt(eigenvalues[i]) << '\n';
  return out.str();
}

std::string trace_to_csv(const std::vector<TracePoint>& trace) {
  std::ostringstream out;
  out << "iteration,max_sq_imbalance,day_ahead_price\n";
  for (const auto& t : trace)
    out << t.iteration << ',' << fmt(t.max_sq_imbalance) << ',' << fmt(t.day_ahead_price) << '\n';
  return out.str();
}

}  // namespace asymarket
