#pragma once

#include <string>
#include <vector>

#include "asymarket/analysis.hpp"
#include "asymarket/beliefs.hpp"
#include "asymarket/config.hpp"
#include "asymarket/equilibrium.hpp"

namespace asymarket {

enum class Family { mean, variance };

// The labeled distributions studied by the experiment commands: three
// upward and three downward tweaks of the reference moment per family, with
// the identity-weighted reference R in the middle of each block.
struct LabeledTarget {
  std::string label;
  Family family = Family::mean;
  bool is_reference = false;
  double target = 0.0;  // target mean or variance; unused for R
};

const std::vector<LabeledTarget>& family_targets(Family family);

// Look up any label ("R", "mu3_up", ..., "sigma3_dn").
const LabeledTarget* find_label(const std::string& label);

struct ResolvedDistribution {
  LabeledTarget spec;
  WeightingParams params;  // identity for R
  Moments moments;
  BeliefSet beliefs;
  bool calibrated = true;
  std::string note;  // calibration failure detail, empty when calibrated
};

ResolvedDistribution resolve_distribution(const LabeledTarget& target, const SampleSet& samples);

// --- sweep rows ------------------------------------------------------------

struct FamilyRow {
  std::string label;
  double delta = 1.0;
  double gamma_w = 1.0;
  double mean = 0.0;
  double variance = 0.0;
  double day_ahead_price = 0.0;
  double p = 0.0;
  double d = 0.0;
  double mismatch = 0.0;  // d - p
  std::size_t iterations = 0;
  double eig_ratio = 0.0;
  bool converged = false;
  std::string note;
};

std::vector<FamilyRow> run_family_sweep(Family family, const RunConfig& cfg);

struct GridRow {
  double pi_p_l = 0.0;
  double pi_c_l = 0.0;
  double lambda_l = 0.0;
  double lambda_h = 0.0;
  double lambda_da = 0.0;
  bool interior = false;
};

// Two-outcome sweep of (pi_p_l, pi_c_l) over a grid x grid lattice spanning
// [0.01, 0.99]^2. Interior points come from the analytic solve; rows with a
// binding bound fall back to the price adjustment.
std::vector<GridRow> run_grid2d(const RunConfig& cfg);

struct StabilityRow {
  std::string family;
  std::string label;
  double delta = 1.0;
  double gamma_w = 1.0;
  std::size_t iterations = 0;
  bool converged = false;
  double eig_ratio = 0.0;
  std::string verdict;
};

std::vector<StabilityRow> run_stability_table(const RunConfig& cfg,
                                              std::vector<std::vector<double>>* spectra = nullptr);

struct WelfareRow {
  std::size_t outcome_rank = 0;  // 1-based, outcomes ascending
  double xi = 0.0;
  double sw_reference = 0.0;
  double sw_asymmetric = 0.0;
  double loss = 0.0;
};

std::vector<WelfareRow> run_welfare(const RunConfig& cfg);

struct FieldRun {
  std::string preset;  // "symmetric" or "asymmetric"
  double pi_p_l = 0.0;
  double pi_c_l = 0.0;
  PriceVector equilibrium;
  std::vector<FieldSample> samples;
  std::vector<FieldSample> trajectory;
  bool trajectory_complete = false;
};

std::vector<FieldRun> run_field(const RunConfig& cfg);

struct DistributionRow {
  std::string label;
  double delta = 1.0;
  double gamma_w = 1.0;
  double mean = 0.0;
  double variance = 0.0;
};

std::vector<DistributionRow> run_distributions(const RunConfig& cfg);

// Day-ahead decisions of the equilibrium for the given instance: analytic
// solution when it is an interior certificate, otherwise the price-adjustment
// iteration with a spectrum-derived step.
DayAheadDecisions solve_dayahead(const MarketInstance& instance, const SolverConfig& base);

// --- CSV rendering ----------------------------------------------------------

std::string to_csv(const std::vector<FamilyRow>& rows);
std::string to_csv(const std::vector<GridRow>& rows);
std::string to_csv(const std::vector<StabilityRow>& rows);
std::string to_csv(const std::vector<WelfareRow>& rows);
std::string field_to_csv(const std::vector<FieldSample>& samples);
std::string to_csv(const std::vector<DistributionRow>& rows);
std::string spectrum_to_csv(const std::vector<double>& eigenvalues);
std::string trace_to_csv(const std::vector<TracePoint>& trace);

}  // namespace asymarket
