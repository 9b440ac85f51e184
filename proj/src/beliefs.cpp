#include "asymarket/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace asymarket {

SampleSet sample_reference(std::size_t n, double mean, double variance, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_reference: n must be >= 2");
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw std::invalid_argument("sample_reference: variance must be positive");
  if (!std::isfinite(mean)) throw std::invalid_argument("sample_reference: mean must be finite");

  std::mt19937_64 rng(seed);
  auto canonical = [&rng] {  // [0, 1) from the top 53 bits
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  const double sd = std::sqrt(variance);
  std::vector<double> values;
  values.reserve(n);
  double spare = 0.0;
  bool has_spare = false;
  while (values.size() < n) {
    double z;
    if (has_spare) {
      z = spare;
      has_spare = false;
    } else {
      double u, v, s;
      do {
        u = 2.0 * canonical() - 1.0;
        v = 2.0 * canonical() - 1.0;
        s = u * u + v * v;
      } while (s <= 0.0 || s >= 1.0);
      const double m = std::sqrt(-2.0 * std::log(s) / s);
      z = u * m;
      spare = v * m;
      has_spare = true;
    }
    values.push_back(std::max(0.0, mean + sd * z));  // renewable output is non-negative
  }
  std::sort(values.begin(), values.end());
  return SampleSet{std::move(values), seed, mean, variance};
}

double weight_cdf(double ref_cdf_value, const WeightingParams& params) {
  if (!(params.delta > 0.0) || !(params.gamma_w > 0.0))
    throw std::invalid_argument("weight_cdf: delta and gamma_w must be positive");
  if (!(ref_cdf_value >= 0.0 && ref_cdf_value <= 1.0))
    throw std::invalid_argument("weight_cdf: CDF level must lie in [0, 1]");
  const double num = params.delta * std::pow(ref_cdf_value, params.gamma_w);
  const double den = num + std::pow(1.0 - ref_cdf_value, params.gamma_w);
  return num / den;
}

BeliefSet discretize(const SampleSet& samples, const WeightingParams& params) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("discretize: sample set must hold >= 2 values");
  if (params.delta == 1.0 && params.gamma_w == 1.0) return BeliefSet::uniform(n);

  std::vector<double> weights(n);
  double prev = 0.0;  // Phi(0) = 0
  for (std::size_t i = 1; i <= n; ++i) {
    const double level = static_cast<double>(i) / static_cast<double>(n);
    const double cur = weight_cdf(level, params);
    weights[i - 1] = std::max(0.0, cur - prev);
    prev = cur;
  }
  return BeliefSet::normalized(std::move(weights));
}

Moments weighted_stats(const SampleSet& samples, const BeliefSet& beliefs) {
  const std::size_t n = samples.size();
  if (beliefs.size() != n)
    throw std::invalid_argument("weighted_stats: sample and belief lengths differ");
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = beliefs[i] * samples.values[i];
  const double mean = kahan_sum(terms);
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = samples.values[i] - mean;
    terms[i] = beliefs[i] * dev * dev;
  }
  return Moments{mean, kahan_sum(terms)};
}

namespace {

constexpr double kParamLo = 1e-3;
constexpr double kParamHi = 1e3;
constexpr double kMomentTol = 1e-6;

WeightingParams params_for(MomentTarget::Kind kind, double value) {
  if (kind == MomentTarget::Kind::mean) return {value, 1.0};
  return {1.0, value};
}

}  // namespace

Calibration calibrate(const SampleSet& samples, const MomentTarget& target) {
  if (!std::isfinite(target.value))
    throw std::invalid_argument("calibrate: target must be finite");
  if (target.kind == MomentTarget::Kind::variance && !(target.value > 0.0))
    throw std::invalid_argument("calibrate: variance target must be positive");

  const bool mean_kind = target.kind == MomentTarget::Kind::mean;
  auto moment = [&](double param) {
    const auto params = params_for(target.kind, param);
    const auto stats = weighted_stats(samples, discretize(samples, params));
    return mean_kind ? stats.mean : stats.variance;
  };

  // Both moments decrease in their parameter: a larger delta moves CDF mass
  // toward small samples, a larger gamma_w concentrates mass at the median.
  double lo = kParamLo, hi = kParamHi;
  double f_lo = moment(lo) - target.value;
  double f_hi = moment(hi) - target.value;
  if (std::abs(f_lo) <= kMomentTol) hi = lo;
  if (std::abs(f_hi) <= kMomentTol) lo = hi;
  if (lo < hi && (f_lo < 0.0) == (f_hi < 0.0)) {
    const bool lo_best = std::abs(f_lo) <= std::abs(f_hi);
    const auto best = params_for(target.kind, lo_best ? lo : hi);
    const auto achieved = weighted_stats(samples, discretize(samples, best));
    throw CalibrationError("calibrate: target unreachable within parameter bounds [1e-3, 1e3]",
                           best, achieved);
  }

  // Bisection in log space; the bracket keeps a sign change even if the
  // moment map is only piecewise monotone.
  double log_lo = std::log(lo), log_hi = std::log(hi);
  bool lo_negative = f_lo < 0.0;
  for (int it = 0; it < 200 && log_hi - log_lo > 1e-14; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    const double f_mid = moment(std::exp(mid)) - target.value;
    if (std::abs(f_mid) <= kMomentTol * 0.1) {
      log_lo = log_hi = mid;
      break;
    }
    if ((f_mid < 0.0) == lo_negative)
      log_lo = mid;
    else
      log_hi = mid;
  }
  const auto params = params_for(target.kind, std::exp(0.5 * (log_lo + log_hi)));
  const auto achieved = weighted_stats(samples, discretize(samples, params));
  const double err = std::abs((mean_kind ? achieved.mean : achieved.variance) - target.value);
  if (err > 1e-3)
    throw CalibrationError("calibrate: root find stalled before reaching the target", params,
                           achieved);
  return Calibration{params, achieved};
}

}  // namespace asymarket
