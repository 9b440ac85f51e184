#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymarket/beliefs.hpp"
#include "asymarket/equilibrium.hpp"
#include "asymarket/market.hpp"

namespace asymarket {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SamplingConfig {
  std::size_t count = 100;
  double mean = 1.5;
  double variance = 0.25;
  std::uint64_t seed = 17;
};

struct ExperimentConfig {
  std::string comparison = "mu3_up";  // distribution label for welfare runs
  std::size_t grid = 49;              // points per axis for grid sweeps
  double tau = 1.0;                   // price-dynamics speed
  double field_extent = 2.0;          // half-width of the field grid around equilibrium
  std::size_t field_points = 15;      // field grid points per axis
};

struct BoxConfig {
  BoxInterval first_stage{0.0, 50.0};
  BoxInterval recourse{0.0, 50.0};                    // broadcast over outcomes
  std::optional<std::vector<BoxInterval>> recourse_each;  // overrides the broadcast

  BoxSet materialize(std::size_t n_outcomes) const;
};

// Parsed configuration file. The market block always carries the cost and
// utility coefficients; outcomes and belief vectors are optional because the
// experiment commands build them from the sampling block.
struct RunConfig {
  double alpha = 1.5;
  double beta = 0.3;
  double gamma_u = 5.0;

  std::optional<std::vector<double>> outcomes;
  std::optional<std::vector<double>> producer_beliefs;
  std::optional<std::vector<double>> consumer_beliefs;
  std::optional<std::vector<double>> operator_beliefs;

  BoxConfig producer_set;
  BoxConfig consumer_set;

  SolverConfig solver;
  SamplingConfig sampling;
  ExperimentConfig experiment;

  // Full instance from explicit outcomes/beliefs; throws ParseError naming
  // whatever is missing.
  MarketInstance instance() const;

  // Instance over the given outcome set with supplied beliefs; boxes and
  // coefficients from the config.
  MarketInstance instance_over(std::vector<double> outcomes_in, BeliefSet producer,
                               BeliefSet consumer,
                               std::optional<BeliefSet> op = std::nullopt) const;
};

// Loads a JSON config. Unknown fields are rejected, missing required fields
// and type mismatches name the offending field path.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

}  // namespace asymarket
