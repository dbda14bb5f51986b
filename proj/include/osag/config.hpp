#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "osag/data.hpp"
#include "osag/sampling.hpp"

namespace osag {

struct ContractConfig {
  std::vector<std::string> key_scheme{"region"};
  double rare_quantile = 0.2;
  int base_priority = 1;
  int rare_priority = 3;
  std::string refine_attribute = "subgroup";
  std::string graph_rule = "shared_prefix";  // shared_prefix | complete
  int graph_prefix = -1;                     // -1: all key parts except the last
};

struct DataConfig {
  std::string source = "synthetic";  // synthetic | csv
  SyntheticSpec synthetic{};
  std::optional<CsvSchema> csv_schema;
  std::string csv_path;            // input for source=csv
  std::string csv_out = "dataset.csv";  // gen-data output file name
};

struct TrainSection {
  std::vector<PolicyKind> policies{PolicyKind::Rand, PolicyKind::ClassBalanced,
                                   PolicyKind::Osag, PolicyKind::OsagMix,
                                   PolicyKind::LambdaFairloss};
  double alpha = 0.5;       // osag_mix mixture coefficient
  double lambda_c = 1.0;    // lambda_fairloss modulation weight
  BaselineKind baseline = BaselineKind::Uniform;
  long long steps = 2000;
  int batch = 32;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  int hidden = 64;
  double eval_fraction = 0.2;
  double loss_clip = 10.0;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  long long cov_window = 0;
  long long log_every = 100;
};

struct TheorySection {
  std::vector<long long> step_grid{100, 1000, 10000};
  std::vector<double> epsilons{0.01, 0.05, 0.1};
  std::vector<int> m_values{2, 10};
  int trials = 2000;
  int decay_trials = 1000;
  int decay_m = 4;
  int risk_trials = 100000;
  int risk_max_m = 32;
  double risk_bound = 10.0;
  int graph_trials = 10000;
  int graph_max_m = 12;
  std::uint64_t seed = 7;
  // Falsifiability hook: scales every verified bound's right-hand side.
  // Anything below 1 should make verification fail loudly.
  double rhs_scale = 1.0;
};

struct RunConfig {
  std::string out_dir = "out";
  DataConfig data{};
  ContractConfig contracts{};
  TrainSection train{};
  TheorySection theory{};

  // Canonical semantic config (out_dir excluded): what run artifacts echo.
  nlohmann::json resolved() const;
  std::string hash() const;  // FNV-1a over the resolved dump, 16 hex chars
};

// Parses and validates a config file; unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig config_from_json(const nlohmann::json& j);

SamplingPolicy resolve_policy(PolicyKind kind, const TrainSection& section);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace osag
