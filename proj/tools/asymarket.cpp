// Experiment runner: solves configured market instances and reproduces the
// sweep, stability, welfare and vector-field data sets as CSV files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "asymarket/analysis.hpp"
#include "asymarket/config.hpp"
#include "asymarket/equilibrium.hpp"
#include "asymarket/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> nu_max;
  std::optional<double> rho;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> grid;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Path to the JSON config")->required();
  cmd->add_option("--out", args.out_dir, "Output directory for CSV files");
  cmd->add_option("--seed", args.seed, "Override sampling.seed");
  cmd->add_option("--nu-max", args.nu_max, "Override solver.nu_max");
  cmd->add_option("--rho", args.rho, "Override solver.rho");
  cmd->add_option("--epsilon", args.epsilon, "Override solver.epsilon");
  cmd->add_option("--grid", args.grid, "Override experiment.grid");
}

asymarket::RunConfig load(const CommonArgs& args) {
  auto cfg = asymarket::load_config(args.config_path);
  if (args.seed) cfg.sampling.seed = *args.seed;
  if (args.nu_max) cfg.solver.nu_max = static_cast<std::size_t>(*args.nu_max);
  if (args.rho) cfg.solver.rho = *args.rho;
  if (args.epsilon) cfg.solver.epsilon = *args.epsilon;
  if (args.grid) cfg.experiment.grid = static_cast<std::size_t>(*args.grid);
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write \"" + path.string() + "\"");
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

asymarket::MarketInstance validated_instance(const asymarket::RunConfig& cfg) {
  auto instance = cfg.instance();
  const auto violations = asymarket::validate(instance);
  if (!violations.empty()) {
    std::cerr << "invalid instance:\n";
    for (const auto& v : violations) std::cerr << "  " << v.field << ": " << v.rule << "\n";
    throw std::runtime_error("configuration failed validation");
  }
  return instance;
}

int cmd_solve(const CommonArgs& args, const std::string& json_path, const std::string& trace_path) {
  const auto cfg = load(args);
  const auto instance = validated_instance(cfg);
  auto solver = cfg.solver;
  solver.trace_enabled = solver.trace_enabled || !trace_path.empty();
  const auto result = asymarket::tatonnement(instance, solver);

  const double da = asymarket::day_ahead_price(result.prices);
  std::printf("converged:       %s\n", result.converged ? "true" : "false");
  std::printf("iterations:      %zu\n", result.iterations);
  std::printf("residual:        %.6g\n", result.residual);
  std::printf("day_ahead_price: %.6f\n", da);
  std::printf("p: %.6f  d: %.6f  mismatch: %.6f\n", result.dispatch.p, result.dispatch.d,
              result.dispatch.d - result.dispatch.p);
  const std::size_t shown = std::min<std::size_t>(result.prices.size(), 12);
  for (std::size_t w = 0; w < shown; ++w)
    std::printf("  lambda[%zu] = %.6f   r = %.6f   l = %.6f\n", w, result.prices[w],
                result.dispatch.r[w], result.dispatch.l[w]);
  if (shown < result.prices.size())
    std::printf("  ... %zu more outcomes\n", result.prices.size() - shown);

  if (!json_path.empty()) {
    nlohmann::json j;
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["residual"] = result.residual;
    j["day_ahead_price"] = da;
    j["prices"] = result.prices.lambda;
    j["dispatch"] = {{"p", result.dispatch.p},
                     {"d", result.dispatch.d},
                     {"r", result.dispatch.r},
                     {"l", result.dispatch.l}};
    write_file(json_path, j.dump(2) + "\n");
  }
  if (!trace_path.empty()) write_file(trace_path, asymarket::trace_to_csv(result.trace));
  return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const CommonArgs& args, const std::string& kind) {
  const auto cfg = load(args);
  const std::filesystem::path out_dir(args.out_dir);
  if (kind == "mean-family" || kind == "variance-family") {
    const auto family =
        kind == "mean-family" ? asymarket::Family::mean : asymarket::Family::variance;
    const auto rows = asymarket::run_family_sweep(family, cfg);
    for (const auto& row : rows)
      if (!row.note.empty()) std::cerr << "note [" << row.label << "]: " << row.note << "\n";
    write_file(out_dir / ("sweep_" + std::string(kind == "mean-family" ? "mean" : "variance") +
                          "_family.csv"),
               asymarket::to_csv(rows));
  } else if (kind == "grid2d") {
    write_file(out_dir / "sweep_grid2d.csv", asymarket::to_csv(asymarket::run_grid2d(cfg)));
  } else {
    std::cerr << "unknown sweep kind \"" << kind
              << "\" (expected mean-family, variance-family or grid2d)\n";
    return kExitError;
  }
  return kExitOk;
}

int cmd_stability(const CommonArgs& args) {
  const auto cfg = load(args);
  std::vector<std::vector<double>> spectra;
  const auto rows = asymarket::run_stability_table(cfg, &spectra);
  const std::filesystem::path out_dir(args.out_dir);
  write_file(out_dir / "stability.csv", asymarket::to_csv(rows));
  for (std::size_t i = 0; i < rows.size(); ++i)
    write_file(out_dir / ("spectrum_" + rows[i].family + "_" + rows[i].label + ".csv"),
               asymarket::spectrum_to_csv(spectra[i]));

  std::printf("%-8s %-10s %12s %12s %6s\n", "family", "label", "iterations", "eig_ratio", "conv");
  for (const auto& row : rows)
    std::printf("%-8s %-10s %12zu %12.4g %6s\n", row.family.c_str(), row.label.c_str(),
                row.iterations, row.eig_ratio, row.converged ? "yes" : "no");
  return kExitOk;
}

int cmd_welfare(const CommonArgs& args) {
  const auto cfg = load(args);
  const auto rows = asymarket::run_welfare(cfg);
  write_file(std::filesystem::path(args.out_dir) /
                 ("welfare_" + cfg.experiment.comparison + ".csv"),
             asymarket::to_csv(rows));
  return kExitOk;
}

int cmd_field(const CommonArgs& args) {
  const auto cfg = load(args);
  const std::filesystem::path out_dir(args.out_dir);
  for (const auto& run : asymarket::run_field(cfg)) {
    write_file(out_dir / ("field_" + run.preset + ".csv"),
               asymarket::field_to_csv(run.samples));
    write_file(out_dir / ("trajectory_" + run.preset + ".csv"),
               asymarket::field_to_csv(run.trajectory));
    if (!run.trajectory_complete)
      std::cerr << "note [" << run.preset << "]: trajectory hit the step cap before settling\n";
  }
  return kExitOk;
}

int cmd_distributions(const CommonArgs& args) {
  const auto cfg = load(args);
  write_file(std::filesystem::path(args.out_dir) / "distributions.csv",
             asymarket::to_csv(asymarket::run_distributions(cfg)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-settlement stochastic market equilibrium toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string sweep_kind;
  std::string json_path;
  std::string trace_path;

  auto* solve = app.add_subcommand("solve", "Solve one configured instance");
  add_common(solve, args);
  solve->add_option("--json", json_path, "Write the result as JSON");
  solve->add_option("--trace", trace_path, "Write the per-iteration trace CSV");

  auto* sweep = app.add_subcommand("sweep", "Run a family or grid sweep");
  sweep->add_option("kind", sweep_kind, "mean-family | variance-family | grid2d")->required();
  add_common(sweep, args);

  auto* stab = app.add_subcommand("stability", "Iterations and spectrum per labeled distribution");
  add_common(stab, args);

  auto* welfare = app.add_subcommand("welfare", "Per-outcome welfare against a comparison label");
  add_common(welfare, args);

  auto* field = app.add_subcommand("field", "Price-dynamics vector field and trajectory");
  add_common(field, args);

  auto* dists = app.add_subcommand("distributions", "Calibrated distribution table");
  add_common(dists, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(args, json_path, trace_path);
    if (sweep->parsed()) return cmd_sweep(args, sweep_kind);
    if (stab->parsed()) return cmd_stability(args);
    if (welfare->parsed()) return cmd_welfare(args);
    if (field->parsed()) return cmd_field(args);
    if (dists->parsed()) return cmd_distributions(args);
  } catch (const asymarket::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitError;
  } catch (const asymarket::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
