#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "asymarket/market.hpp"

namespace asymarket {

// Sorted empirical outcome set together with the sampling configuration that
// produced it.
struct SampleSet {
  std::vector<double> values;  // ascending
  std::uint64_t seed = 0;
  double source_mean = 0.0;
  double source_variance = 0.0;

  std::size_t size() const { return values.size(); }
};

// Parameters of the CDF weighting transform
//   Phi(F) = delta F^gamma_w / (delta F^gamma_w + (1 - F)^gamma_w).
// delta primarily moves the weighted mean, gamma_w the weighted variance.
struct WeightingParams {
  double delta = 1.0;
  double gamma_w = 1.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Draws n normal samples N(mean, variance) with the Marsaglia polar method
// over a mt19937_64 stream (uniforms built from the top 53 bits, so the draw
// sequence depends only on the seed). Negative draws are clamped to zero;
// output is sorted ascending.
SampleSet sample_reference(std::size_t n, double mean, double variance, std::uint64_t seed);

// Weighted CDF level for a reference level F in [0, 1]. Monotone in F, fixes
// the endpoints: Phi(0) = 0, Phi(1) = 1.
double weight_cdf(double ref_cdf_value, const WeightingParams& params);

// Probability mass per sorted sample: pi_i = Phi(i/n) - Phi((i-1)/n), floored
// at kMinBeliefProb and renormalized. Identity parameters yield the uniform
// belief exactly.
BeliefSet discretize(const SampleSet& samples, const WeightingParams& params);

Moments weighted_stats(const SampleSet& samples, const BeliefSet& beliefs);

struct MomentTarget {
  enum class Kind { mean, variance };
  Kind kind = Kind::mean;
  double value = 0.0;

  static MomentTarget mean(double v) { return {Kind::mean, v}; }
  static MomentTarget variance(double v) { return {Kind::variance, v}; }
};

struct Calibration {
  WeightingParams params;
  Moments achieved;
};

struct CalibrationError : std::runtime_error {
  CalibrationError(const std::string& msg, WeightingParams best_params, Moments best_achieved)
      : std::runtime_error(msg), best(best_params), achieved(best_achieved) {}
  WeightingParams best;
  Moments achieved;
};

// One-dimensional root find: mean targets solve for delta with gamma_w = 1,
// variance targets solve for gamma_w with delta = 1, both over [1e-3, 1e3].
// Throws CalibrationError (carrying the best point found) when the target is
// out of reach within those bounds.
Calibration calibrate(const SampleSet& samples, const MomentTarget& target);

}  // namespace asymarket
