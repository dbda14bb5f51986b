#include "osag/config.hpp"

#include <cstdio>
#include <fstream>

#include "osag/errors.hpp"

namespace osag {

namespace {

using nlohmann::json;

// Pulls a typed value out of `obj` if present, erasing it so that leftover
// keys can be rejected as unknown.
template <class T>
void take(json& obj, const char* key, T& field, const std::string& section) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    field = it->get<T>();
  } catch (const json::exception&) {
    throw config_error("config: bad value for " + section + "." + key);
  }
  obj.erase(it);
}

void reject_unknown(const json& obj, const std::string& section) {
  if (!obj.empty())
    throw config_error("config: unknown key '" + section + "." + obj.begin().key() + "'");
}

json expect_object(json& parent, const char* key) {
  const auto it = parent.find(key);
  if (it == parent.end()) return json::object();
  if (!it->is_object()) throw config_error(std::string("config: '") + key + "' must be an object");
  json obj = *it;
  parent.erase(it);
  return obj;
}

SyntheticSpec parse_synthetic(json obj) {
  SyntheticSpec s;
  take(obj, "regions", s.regions, "data.synthetic");
  take(obj, "classes", s.classes, "data.synthetic");
  take(obj, "rare_fraction", s.rare_fraction, "data.synthetic");
  take(obj, "base_cell_count", s.base_cell_count, "data.synthetic");
  take(obj, "rare_scale", s.rare_scale, "data.synthetic");
  take(obj, "subgroups", s.subgroups, "data.synthetic");
  take(obj, "subgroup_spread", s.subgroup_spread, "data.synthetic");
  take(obj, "dim", s.dim, "data.synthetic");
  take(obj, "separation", s.separation, "data.synthetic");
  take(obj, "noise", s.noise, "data.synthetic");
  take(obj, "seed", s.seed, "data.synthetic");
  reject_unknown(obj, "data.synthetic");
  return s;
}

CsvSchema parse_csv_schema(json obj, std::string& path) {
  CsvSchema schema;
  take(obj, "path", path, "data.csv");
  take(obj, "feature_columns", schema.feature_columns, "data.csv");
  take(obj, "label_column", schema.label_column, "data.csv");
  take(obj, "attribute_columns", schema.attribute_columns, "data.csv");
  if (obj.contains("grid")) {
    GridSpec grid;
    json g = expect_object(obj, "grid");
    take(g, "x_column", grid.x_column, "data.csv.grid");
    take(g, "y_column", grid.y_column, "data.csv.grid");
    take(g, "cells", grid.cells, "data.csv.grid");
    take(g, "attribute", grid.attribute, "data.csv.grid");
    reject_unknown(g, "data.csv.grid");
    schema.grid = std::move(grid);
  }
  reject_unknown(obj, "data.csv");
  return schema;
}

json synthetic_to_json(const SyntheticSpec& s) {
  return {{"regions", s.regions},
          {"classes", s.classes},
          {"rare_fraction", s.rare_fraction},
          {"base_cell_count", s.base_cell_count},
          {"rare_scale", s.rare_scale},
          {"subgroups", s.subgroups},
          {"subgroup_spread", s.subgroup_spread},
          {"dim", s.dim},
          {"separation", s.separation},
          {"noise", s.noise},
          {"seed", s.seed}};
}

}  // namespace

RunConfig config_from_json(const json& input) {
  if (!input.is_object()) throw config_error("config: top level must be an object");
  json root = input;
  RunConfig cfg;
  take(root, "out_dir", cfg.out_dir, "");

  json data = expect_object(root, "data");
  take(data, "source", cfg.data.source, "data");
  if (cfg.data.source != "synthetic" && cfg.data.source != "csv")
    throw config_error("config: data.source must be 'synthetic' or 'csv'");
  if (data.contains("synthetic"))
    cfg.data.synthetic = parse_synthetic(expect_object(data, "synthetic"));
  if (data.contains("csv"))
    cfg.data.csv_schema = parse_csv_schema(expect_object(data, "csv"), cfg.data.csv_path);
  take(data, "csv_out", cfg.data.csv_out, "data");
  reject_unknown(data, "data");
  if (cfg.data.source == "csv" && (!cfg.data.csv_schema || cfg.data.csv_path.empty()))
    throw config_error("config: data.source=csv requires data.csv with a path");

  json contracts = expect_object(root, "contracts");
  take(contracts, "key_scheme", cfg.contracts.key_scheme, "contracts");
  take(contracts, "rare_quantile", cfg.contracts.rare_quantile, "contracts");
  take(contracts, "base_priority", cfg.contracts.base_priority, "contracts");
  take(contracts, "rare_priority", cfg.contracts.rare_priority, "contracts");
  take(contracts, "refine_attribute", cfg.contracts.refine_attribute, "contracts");
  take(contracts, "graph_rule", cfg.contracts.graph_rule, "contracts");
  take(contracts, "graph_prefix", cfg.contracts.graph_prefix, "contracts");
  reject_unknown(contracts, "contracts");
  if (cfg.contracts.graph_rule != "shared_prefix" && cfg.contracts.graph_rule != "complete")
    throw config_error("config: contracts.graph_rule must be 'shared_prefix' or 'complete'");
  if (cfg.contracts.key_scheme.empty())
    throw config_error("config: contracts.key_scheme must name at least one attribute");

  json train = expect_object(root, "train");
  if (train.contains("policies")) {
    std::vector<std::string> names;
    take(train, "policies", names, "train");
    cfg.train.policies.clear();
    for (const auto& name : names) cfg.train.policies.push_back(parse_policy(name));
    if (cfg.train.policies.empty())
      throw config_error("config: train.policies must not be empty");
  }
  take(train, "alpha", cfg.train.alpha, "train");
  take(train, "lambda_c", cfg.train.lambda_c, "train");
  if (train.contains("baseline")) {
    std::string baseline;
    take(train, "baseline", baseline, "train");
    if (baseline == "uniform")
      cfg.train.baseline = BaselineKind::Uniform;
    else if (baseline == "cb" || baseline == "class_balanced")
      cfg.train.baseline = BaselineKind::ClassBalanced;
    else
      throw config_error("config: train.baseline must be 'uniform' or 'cb'");
  }
  take(train, "steps", cfg.train.steps, "train");
  take(train, "batch", cfg.train.batch, "train");
  take(train, "learning_rate", cfg.train.learning_rate, "train");
  take(train, "weight_decay", cfg.train.weight_decay, "train");
  take(train, "hidden", cfg.train.hidden, "train");
  take(train, "eval_fraction", cfg.train.eval_fraction, "train");
  take(train, "loss_clip", cfg.train.loss_clip, "train");
  take(train, "seeds", cfg.train.seeds, "train");
  take(train, "cov_window", cfg.train.cov_window, "train");
  take(train, "log_every", cfg.train.log_every, "train");
  reject_unknown(train, "train");
  if (cfg.train.seeds.empty()) throw config_error("config: train.seeds must not be empty");

  json theory = expect_object(root, "theory");
  take(theory, "step_grid", cfg.theory.step_grid, "theory");
  take(theory, "epsilons", cfg.theory.epsilons, "theory");
  take(theory, "m_values", cfg.theory.m_values, "theory");
  take(theory, "trials", cfg.theory.trials, "theory");
  take(theory, "decay_trials", cfg.theory.decay_trials, "theory");
  take(theory, "decay_m", cfg.theory.decay_m, "theory");
  take(theory, "risk_trials", cfg.theory.risk_trials, "theory");
  take(theory, "risk_max_m", cfg.theory.risk_max_m, "theory");
  take(theory, "risk_bound", cfg.theory.risk_bound, "theory");
  take(theory, "graph_trials", cfg.theory.graph_trials, "theory");
  take(theory, "graph_max_m", cfg.theory.graph_max_m, "theory");
  take(theory, "seed", cfg.theory.seed, "theory");
  take(theory, "rhs_scale", cfg.theory.rhs_scale, "theory");
  reject_unknown(theory, "theory");

  reject_unknown(root, "");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw io_error("cannot open config '" + path + "'");
  json parsed;
  try {
    parsed = json::parse(file);
  } catch (const json::exception& e) {
    throw config_error("config: parse failure in '" + path + "': " + e.what());
  }
  return config_from_json(parsed);
}

json RunConfig::resolved() const {
  json data_section{{"source", data.source}, {"csv_out", data.csv_out}};
  if (data.source == "synthetic") {
    data_section["synthetic"] = synthetic_to_json(data.synthetic);
  } else {
    json csv{{"path", data.csv_path},
             {"feature_columns", data.csv_schema->feature_columns},
             {"label_column", data.csv_schema->label_column},
             {"attribute_columns", data.csv_schema->attribute_columns}};
    if (data.csv_schema->grid)
      csv["grid"] = {{"x_column", data.csv_schema->grid->x_column},
                     {"y_column", data.csv_schema->grid->y_column},
                     {"cells", data.csv_schema->grid->cells},
                     {"attribute", data.csv_schema->grid->attribute}};
    data_section["csv"] = std::move(csv);
  }

  std::vector<std::string> policy_names;
  for (const auto kind : train.policies) policy_names.push_back(policy_name(kind));

  return {{"data", std::move(data_section)},
          {"contracts",
           {{"key_scheme", contracts.key_scheme},
            {"rare_quantile", contracts.rare_quantile},
            {"base_priority", contracts.base_priority},
            {"rare_priority", contracts.rare_priority},
            {"refine_attribute", contracts.refine_attribute},
            {"graph_rule", contracts.graph_rule},
            {"graph_prefix", contracts.graph_prefix}}},
          {"train",
           {{"policies", policy_names},
            {"alpha", train.alpha},
            {"lambda_c", train.lambda_c},
            {"baseline", train.baseline == BaselineKind::Uniform ? "uniform" : "cb"},
            {"steps", train.steps},
            {"batch", train.batch},
            {"learning_rate", train.learning_rate},
            {"weight_decay", train.weight_decay},
            {"hidden", train.hidden},
            {"eval_fraction", train.eval_fraction},
            {"loss_clip", train.loss_clip},
            {"seeds", train.seeds},
            {"cov_window", train.cov_window},
            {"log_every", train.log_every}}},
          {"theory",
           {{"step_grid", theory.step_grid},
            {"epsilons", theory.epsilons},
            {"m_values", theory.m_values},
            {"trials", theory.trials},
            {"decay_trials", theory.decay_trials},
            {"decay_m", theory.decay_m},
            {"risk_trials", theory.risk_trials},
            {"risk_max_m", theory.risk_max_m},
            {"risk_bound", theory.risk_bound},
            {"graph_trials", theory.graph_trials},
            {"graph_max_m", theory.graph_max_m},
            {"seed", theory.seed},
            {"rhs_scale", theory.rhs_scale}}}};
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (const unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 0x100000001B3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string RunConfig::hash() const { return fnv1a_hex(resolved().dump()); }

SamplingPolicy resolve_policy(PolicyKind kind, const TrainSection& section) {
  SamplingPolicy policy = SamplingPolicy::make(kind);
  if (kind == PolicyKind::OsagMix) {
    policy.alpha = section.alpha;
    policy.baseline = section.baseline;
  }
  if (kind == PolicyKind::LambdaFairloss) policy.lambda_c = section.lambda_c;
  policy.validate();
  return policy;
}

}  // namespace osag
