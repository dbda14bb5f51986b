#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "osag/contracts.hpp"
#include "osag/dataset.hpp"
#include "osag/mlp.hpp"
#include "osag/risk.hpp"
#include "osag/sampling.hpp"

namespace osag {

struct TrainConfig {
  SamplingPolicy policy{};
  long long steps = 2000;
  int batch = 32;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  int hidden = 64;
  std::uint64_t seed = 1;
  double eval_fraction = 0.2;
  double loss_clip = 10.0;    // contract-loss ceiling B
  long long cov_window = 0;   // 0: coverage over all recorded draws
  long long log_every = 100;  // coverage curve cadence, in steps

  void validate() const;
};

struct SplitDataset {
  Dataset train;
  Dataset test;
};

// Per-class deterministic shuffle, then eval_fraction of each class to test
// (at least one per class when the class has two or more samples).
SplitDataset stratified_split(const Dataset& ds, double eval_fraction,
                              std::uint64_t seed);

// Test samples whose key never materialized in training land here.
struct UnseenBucket {
  long long count = 0;
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

struct Evaluation {
  double acc_all = 0.0;                  // percent
  std::optional<double> acc_high;        // percent; absent when no max-priority test samples
  ContractLossVector contract_losses;    // mean test loss per contract, clipped
  Eigen::VectorXi contract_test_counts;  // test members per contract
  UnseenBucket unseen;
};

// Argmax predictions; acc_high pools test samples whose contract priority
// equals the set's maximum level.
Evaluation evaluate(const MlpModel& model, const Dataset& test,
                    const ContractSet& set, double loss_clip);

struct CoverageCurvePoint {
  long long draws = 0;
  Eigen::VectorXd coverage;
  double prio_cov_err = 0.0;  // percent
};

struct RunMetrics {
  double acc_all = 0.0;
  std::optional<double> acc_high;
  double prio_cov_err = 0.0;  // percent, from the ledger vs target shares
  double first_decile_loss = 0.0;
  double last_decile_loss = 0.0;
  long long total_draws = 0;
  int num_contracts = 0;
  Eigen::VectorXd target_shares;
  std::vector<CoverageCurvePoint> coverage_curve;
  Evaluation eval;
};

// Runs cfg.steps optimizer steps. Every batch element is an independent draw
// under the policy and records its contract in the coverage ledger. The whole
// run is deterministic in (cfg, set, split).
RunMetrics train(const SplitDataset& split, const ContractSet& set,
                 const TrainConfig& cfg);

}  // namespace osag
