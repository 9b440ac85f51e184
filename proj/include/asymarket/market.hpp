#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace asymarket {

// Smallest admissible belief entry. Probability-removed prices divide by
// pi_w, so a zero mass is never representable.
inline constexpr double kMinBeliefProb = 1e-9;
inline constexpr double kSimplexTol = 1e-12;

// Compensated summation; keeps the simplex check meaningful for long vectors.
double kahan_sum(std::span<const double> xs);

// Probability vector over the outcome set of one agent. Entries are strictly
// positive and sum to one within kSimplexTol.
struct BeliefSet {
  std::vector<double> probs;

  static BeliefSet uniform(std::size_t n);

  // Floors entries at kMinBeliefProb and renormalizes. Rejects empty,
  // non-finite or nowhere-positive input.
  static BeliefSet normalized(std::vector<double> weights);

  // Validating constructor path: rejects anything off the simplex.
  static BeliefSet checked(std::vector<double> probs);

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
  bool is_simplex() const;
};

struct BoxInterval {
  double lo = 0.0;
  double hi = 50.0;
};

// Axis-aligned feasible region: one interval for the first-stage decision and
// one per outcome for the recourse decision.
struct BoxSet {
  BoxInterval first_stage;
  std::vector<BoxInterval> recourse;

  static BoxSet cube(std::size_t n_outcomes, double lo = 0.0, double hi = 50.0);
};

struct PriceVector {
  std::vector<double> lambda;

  static PriceVector zeros(std::size_t n) { return {std::vector<double>(n, 0.0)}; }

  std::size_t size() const { return lambda.size(); }
  double operator[](std::size_t i) const { return lambda[i]; }
  bool operator==(const PriceVector&) const = default;
};

// Day-ahead quantities (p, d) plus per-outcome recourse (r_w, l_w).
struct DispatchSchedule {
  double p = 0.0;
  std::vector<double> r;
  double d = 0.0;
  std::vector<double> l;
};

struct MarketInstance {
  double alpha = 0.0;    // producer cost c(x) = alpha x^2 / 2
  double beta = 0.0;     // consumer utility curvature
  double gamma_u = 0.0;  // consumer utility u(x) = gamma_u x - beta x^2 / 2

  std::vector<double> outcomes;  // renewable output per outcome, >= 0

  BeliefSet producer_beliefs;
  BeliefSet consumer_beliefs;
  std::optional<BeliefSet> operator_beliefs;  // used only by centralized clearing

  BoxSet producer_set;
  BoxSet consumer_set;

  std::size_t n_outcomes() const { return outcomes.size(); }

  double cost(double x) const { return 0.5 * alpha * x * x; }
  double utility(double x) const { return gamma_u * x - 0.5 * beta * x * x; }
};

struct Violation {
  std::string field;
  std::string rule;
};

// Diagnostic check of every type invariant. Total: never throws, reports all
// violations it finds.
std::vector<Violation> validate(const MarketInstance& instance);

// Throws std::invalid_argument listing every violation.
void require_valid(const MarketInstance& instance);

// True if (p, r) lies in the producer set and (d, l) in the consumer set,
// within tol on each bound.
bool within_boxes(const DispatchSchedule& dispatch, const MarketInstance& instance,
                  double tol = 1e-9);

}  // namespace asymarket
