#include "asymarket/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace asymarket {

using nlohmann::json;

BoxSet BoxConfig::materialize(std::size_t n_outcomes) const {
  BoxSet out;
  out.first_stage = first_stage;
  if (recourse_each) {
    out.recourse = *recourse_each;
  } else {
    out.recourse.assign(n_outcomes, recourse);
  }
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError("config error at \"" + path + "\": " + what);
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::vector<double> as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

BoxInterval as_interval(const json& j, const std::string& path) {
  const auto v = as_vector(j, path);
  if (v.size() != 2) fail(path, "expected [lo, hi]");
  return BoxInterval{v[0], v[1]};
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) fail(path + "." + it.key(), "unknown field");
  }
}

BoxConfig parse_box(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, path, {"first_stage", "recourse"});
  BoxConfig out;
  if (const json* fs = find(j, "first_stage")) out.first_stage = as_interval(*fs, path + ".first_stage");
  if (const json* rec = find(j, "recourse")) {
    const std::string rp = path + ".recourse";
    if (rec->is_array() && rec->size() > 0 && (*rec)[0].is_array()) {
      std::vector<BoxInterval> each;
      for (std::size_t i = 0; i < rec->size(); ++i)
        each.push_back(as_interval((*rec)[i], rp + "[" + std::to_string(i) + "]"));
      out.recourse_each = std::move(each);
    } else {
      out.recourse = as_interval(*rec, rp);
    }
  }
  return out;
}

}  // namespace

MarketInstance RunConfig::instance() const {
  if (!outcomes) throw ParseError("config error at \"market.outcomes\": required for this command");
  if (!producer_beliefs)
    throw ParseError("config error at \"market.producer_beliefs\": required for this command");
  if (!consumer_beliefs)
    throw ParseError("config error at \"market.consumer_beliefs\": required for this command");

  MarketInstance inst;
  inst.alpha = alpha;
  inst.beta = beta;
  inst.gamma_u = gamma_u;
  inst.outcomes = *outcomes;
  inst.producer_beliefs = BeliefSet{*producer_beliefs};
  inst.consumer_beliefs = BeliefSet{*consumer_beliefs};
  if (operator_beliefs) inst.operator_beliefs = BeliefSet{*operator_beliefs};
  inst.producer_set = producer_set.materialize(inst.outcomes.size());
  inst.consumer_set = consumer_set.materialize(inst.outcomes.size());
  return inst;
}

MarketInstance RunConfig::instance_over(std::vector<double> outcomes_in, BeliefSet producer,
                                        BeliefSet consumer, std::optional<BeliefSet> op) const {
  MarketInstance inst;
  inst.alpha = alpha;
  inst.beta = beta;
  inst.gamma_u = gamma_u;
  inst.outcomes = std::move(outcomes_in);
  inst.producer_beliefs = std::move(producer);
  inst.consumer_beliefs = std::move(consumer);
  inst.operator_beliefs = std::move(op);
  inst.producer_set = producer_set.materialize(inst.outcomes.size());
  inst.consumer_set = consumer_set.materialize(inst.outcomes.size());
  return inst;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("config error in " + origin + ": " + e.what());
  }
  if (!root.is_object()) throw ParseError("config error in " + origin + ": top level must be an object");
  check_keys(root, origin, {"market", "solver", "sampling", "experiment"});

  RunConfig cfg;

  const json* market = find(root, "market");
  if (!market) fail("market", "missing field \"market\"");
  if (!market->is_object()) fail("market", "expected an object");
  check_keys(*market, "market",
             {"alpha", "beta", "gamma_u", "outcomes", "producer_beliefs", "consumer_beliefs",
              "operator_beliefs", "producer_set", "consumer_set"});
  const json* alpha = find(*market, "alpha");
  if (!alpha) fail("market.alpha", "missing field \"alpha\"");
  cfg.alpha = as_number(*alpha, "market.alpha");
  const json* beta = find(*market, "beta");
  if (!beta) fail("market.beta", "missing field \"beta\"");
  cfg.beta = as_number(*beta, "market.beta");
  const json* gamma_u = find(*market, "gamma_u");
  if (!gamma_u) fail("market.gamma_u", "missing field \"gamma_u\"");
  cfg.gamma_u = as_number(*gamma_u, "market.gamma_u");

  if (const json* j = find(*market, "outcomes")) cfg.outcomes = as_vector(*j, "market.outcomes");
  if (const json* j = find(*market, "producer_beliefs"))
    cfg.producer_beliefs = as_vector(*j, "market.producer_beliefs");
  if (const json* j = find(*market, "consumer_beliefs"))
    cfg.consumer_beliefs = as_vector(*j, "market.consumer_beliefs");
  if (const json* j = find(*market, "operator_beliefs"))
    cfg.operator_beliefs = as_vector(*j, "market.operator_beliefs");
  if (const json* j = find(*market, "producer_set")) cfg.producer_set = parse_box(*j, "market.producer_set");
  if (const json* j = find(*market, "consumer_set")) cfg.consumer_set = parse_box(*j, "market.consumer_set");

  if (const json* solver = find(root, "solver")) {
    if (!solver->is_object()) fail("solver", "expected an object");
    check_keys(*solver, "solver", {"rho", "epsilon", "nu_max", "lambda0", "trace"});
    if (const json* j = find(*solver, "rho")) cfg.solver.rho = as_number(*j, "solver.rho");
    if (const json* j = find(*solver, "epsilon")) cfg.solver.epsilon = as_number(*j, "solver.epsilon");
    if (const json* j = find(*solver, "nu_max"))
      cfg.solver.nu_max = static_cast<std::size_t>(as_u64(*j, "solver.nu_max"));
    if (const json* j = find(*solver, "lambda0")) {
      if (j->is_number()) {
        // scalar broadcast happens once the outcome count is known
        const double v = as_number(*j, "solver.lambda0");
        if (cfg.outcomes) cfg.solver.lambda0 = PriceVector{std::vector<double>(cfg.outcomes->size(), v)};
        else if (v != 0.0) fail("solver.lambda0", "scalar start requires explicit outcomes");
      } else {
        cfg.solver.lambda0 = PriceVector{as_vector(*j, "solver.lambda0")};
      }
    }
    if (const json* j = find(*solver, "trace")) cfg.solver.trace_enabled = as_bool(*j, "solver.trace");
  }

  if (const json* sampling = find(root, "sampling")) {
    if (!sampling->is_object()) fail("sampling", "expected an object");
    check_keys(*sampling, "sampling", {"count", "mean", "variance", "seed"});
    if (const json* j = find(*sampling, "count"))
      cfg.sampling.count = static_cast<std::size_t>(as_u64(*j, "sampling.count"));
    if (const json* j = find(*sampling, "mean")) cfg.sampling.mean = as_number(*j, "sampling.mean");
    if (const json* j = find(*sampling, "variance"))
      cfg.sampling.variance = as_number(*j, "sampling.variance");
    if (const json* j = find(*sampling, "seed")) cfg.sampling.seed = as_u64(*j, "sampling.seed");
  }

  if (const json* experiment = find(root, "experiment")) {
    if (!experiment->is_object()) fail("experiment", "expected an object");
    check_keys(*experiment, "experiment",
               {"comparison", "grid", "tau", "field_extent", "field_points"});
    if (const json* j = find(*experiment, "comparison")) {
      if (!j->is_string()) fail("experiment.comparison", "expected a string");
      cfg.experiment.comparison = j->get<std::string>();
    }
    if (const json* j = find(*experiment, "grid"))
      cfg.experiment.grid = static_cast<std::size_t>(as_u64(*j, "experiment.grid"));
    if (const json* j = find(*experiment, "tau")) cfg.experiment.tau = as_number(*j, "experiment.tau");
    if (const json* j = find(*experiment, "field_extent"))
      cfg.experiment.field_extent = as_number(*j, "experiment.field_extent");
    if (const json* j = find(*experiment, "field_points"))
      cfg.experiment.field_points = static_cast<std::size_t>(as_u64(*j, "experiment.field_points"));
  }

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config error: cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace asymarket
