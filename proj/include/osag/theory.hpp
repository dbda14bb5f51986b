#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace osag {

// Monte Carlo estimate of coverage concentration for i.i.d. contract draws
// with Pr(C_t = c) = w_c, against the Hoeffding bound 2 exp(-2 T eps^2) per
// contract and its union form 2 m exp(-2 T eps^2) for the event
// E_cov >= m * eps. Empirical rates carry a 3-standard-error acceptance
// buffer (binomial SE of the trial estimate).
struct ConcentrationReport {
  int m = 0;
  long long steps = 0;  // T
  double epsilon = 0.0;
  int trials = 0;

  double hoeffding_bound = 0.0;
  double union_bound = 0.0;

  Eigen::VectorXd per_contract_violation_rate;  // Pr(|qhat_T(c) - w_c| >= eps)
  Eigen::VectorXd per_contract_stderr;
  double union_event_rate = 0.0;  // Pr(E_cov >= m * eps)
  double union_stderr = 0.0;

  bool per_contract_hold = false;  // every rate <= bound + 3 SE
  bool union_holds = false;
  bool holds = false;
};

ConcentrationReport run_concentration_trials(const Eigen::VectorXd& target_shares,
                                             long long steps, double epsilon,
                                             int trials, std::uint64_t seed);

// One set of trial draws per (w, T) cell evaluated against every epsilon.
std::vector<ConcentrationReport> concentration_grid(
    const Eigen::VectorXd& target_shares, const std::vector<long long>& step_grid,
    const std::vector<double>& epsilons, int trials, std::uint64_t seed);

struct DecayPoint {
  long long steps = 0;
  double mean_cov_err = 0.0;
  double stddev = 0.0;  // sample std over trials
};

// Mean coverage error over trials at each step count; prefixes of one draw
// sequence per trial, so the curve is internally consistent.
std::vector<DecayPoint> coverage_decay_curve(const Eigen::VectorXd& target_shares,
                                             const std::vector<long long>& step_grid,
                                             int trials, std::uint64_t seed);

}  // namespace osag
