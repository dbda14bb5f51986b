#pragma once

#include <Eigen/Core>

#include "osag/contracts.hpp"

namespace osag {

// Per-contract average losses, clipped into [0, bound] after averaging.
struct ContractLossVector {
  Eigen::VectorXd losses;
  double bound = 0.0;
};

// Mean of each contract's member losses (denominator n_c), clipped at bound.
ContractLossVector contract_losses(const Eigen::Ref<const Eigen::VectorXd>& per_sample_losses,
                                   const ContractSet& set, double bound);

// Throws unless q is a distribution over m outcomes (entries >= 0, sum 1
// within tolerance).
void validate_distribution(const Eigen::Ref<const Eigen::VectorXd>& q, int m);

// sum_c q(c) * losses[c]: the risk actually optimized by a coverage pattern.
double service_risk(const ContractLossVector& lv,
                    const Eigen::Ref<const Eigen::VectorXd>& q);

struct DeviationReport {
  double lhs = 0.0;  // |risk(q) - risk(q_tilde)|
  double rhs = 0.0;  // bound * ||q - q_tilde||_1
  bool holds = false;
};

// Checks |R(q) - R(q_tilde)| <= B ||q - q_tilde||_1 (slack 1e-12).
DeviationReport risk_deviation_bound_check(const ContractLossVector& lv,
                                           const Eigen::Ref<const Eigen::VectorXd>& q,
                                           const Eigen::Ref<const Eigen::VectorXd>& q_tilde);

}  // namespace osag
