#include "asymarket/market.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace asymarket {

double kahan_sum(std::span<const double> xs) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : xs) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

BeliefSet BeliefSet::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("BeliefSet::uniform: n must be >= 1");
  return BeliefSet{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

BeliefSet BeliefSet::normalized(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("BeliefSet::normalized: empty weights");
  bool any_positive = false;
  for (double& w : weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("BeliefSet::normalized: non-finite weight");
    any_positive = any_positive || w > 0.0;
    w = std::max(w, kMinBeliefProb);
  }
  if (!any_positive)
    throw std::invalid_argument("BeliefSet::normalized: weights carry no positive mass");
  const double total = kahan_sum(weights);
  for (double& w : weights) w /= total;
  return BeliefSet{std::move(weights)};
}

BeliefSet BeliefSet::checked(std::vector<double> probs) {
  BeliefSet b{std::move(probs)};
  if (b.probs.empty()) throw std::invalid_argument("BeliefSet: empty probability vector");
  if (!b.is_simplex())
    throw std::invalid_argument(
        "BeliefSet: entries must be strictly positive and sum to 1 within 1e-12");
  return b;
}

bool BeliefSet::is_simplex() const {
  if (probs.empty()) return false;
  for (double p : probs)
    if (!(p > 0.0) || !std::isfinite(p)) return false;
  return std::abs(kahan_sum(probs) - 1.0) <= kSimplexTol;
}

BoxSet BoxSet::cube(std::size_t n_outcomes, double lo, double hi) {
  return BoxSet{{lo, hi}, std::vector<BoxInterval>(n_outcomes, {lo, hi})};
}

namespace {

void check_beliefs(const BeliefSet& b, std::size_t n, const std::string& field,
                   std::vector<Violation>& out) {
  if (b.size() != n) {
    out.push_back({field, "length must equal the number of outcomes"});
    return;
  }
  bool positive = true;
  for (double p : b.probs)
    if (!(p > 0.0) || !std::isfinite(p)) positive = false;
  if (!positive) out.push_back({field, "entries must be strictly positive"});
  if (positive && std::abs(kahan_sum(b.probs) - 1.0) > kSimplexTol)
    out.push_back({field, "simplex sum != 1"});
}

void check_box(const BoxSet& box, std::size_t n, const std::string& field,
               std::vector<Violation>& out) {
  auto check_interval = [&](const BoxInterval& iv, const std::string& name) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      out.push_back({name, "bounds must be finite"});
    else if (iv.lo > iv.hi)
      out.push_back({name, "lower bound exceeds upper bound"});
  };
  check_interval(box.first_stage, field + ".first_stage");
  if (box.recourse.size() != n) {
    out.push_back({field + ".recourse", "length must equal the number of outcomes"});
    return;
  }
  for (std::size_t w = 0; w < n; ++w)
    check_interval(box.recourse[w], field + ".recourse[" + std::to_string(w) + "]");
}

}  // namespace

std::vector<Violation> validate(const MarketInstance& instance) {
  std::vector<Violation> out;
  if (!(instance.alpha > 0.0) || !std::isfinite(instance.alpha))
    out.push_back({"alpha", "alpha must be positive"});
  if (!(instance.beta > 0.0) || !std::isfinite(instance.beta))
    out.push_back({"beta", "beta must be positive"});
  if (!(instance.gamma_u > 0.0) || !std::isfinite(instance.gamma_u))
    out.push_back({"gamma_u", "gamma_u must be positive"});

  const std::size_t n = instance.outcomes.size();
  if (n == 0) out.push_back({"outcomes", "at least one outcome required"});
  for (std::size_t w = 0; w < n; ++w)
    if (!(instance.outcomes[w] >= 0.0) || !std::isfinite(instance.outcomes[w]))
      out.push_back({"outcomes[" + std::to_string(w) + "]", "must be non-negative and finite"});

  check_beliefs(instance.producer_beliefs, n, "producer_beliefs", out);
  check_beliefs(instance.consumer_beliefs, n, "consumer_beliefs", out);
  if (instance.operator_beliefs) check_beliefs(*instance.operator_beliefs, n, "operator_beliefs", out);

  check_box(instance.producer_set, n, "producer_set", out);
  check_box(instance.consumer_set, n, "consumer_set", out);
  return out;
}

void require_valid(const MarketInstance& instance) {
  const auto violations = validate(instance);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid market instance:";
  for (const auto& v : violations) msg << " [" << v.field << ": " << v.rule << "]";
  throw std::invalid_argument(msg.str());
}

bool within_boxes(const DispatchSchedule& dispatch, const MarketInstance& instance, double tol) {
  const std::size_t n = instance.n_outcomes();
  if (dispatch.r.size() != n || dispatch.l.size() != n) return false;
  auto inside = [tol](double x, const BoxInterval& iv) {
    return x >= iv.lo - tol && x <= iv.hi + tol;
  };
  if (!inside(dispatch.p, instance.producer_set.first_stage)) return false;
  if (!inside(dispatch.d, instance.consumer_set.first_stage)) return false;
  for (std::size_t w = 0; w < n; ++w) {
    if (!inside(dispatch.r[w], instance.producer_set.recourse[w])) return false;
    if (!inside(dispatch.l[w], instance.consumer_set.recourse[w])) return false;
  }
  return true;
}

}  // namespace asymarket
