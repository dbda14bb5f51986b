#include "osag/risk.hpp"

#include <cmath>

#include "osag/coverage.hpp"
#include "osag/errors.hpp"

namespace osag {

ContractLossVector contract_losses(const Eigen::Ref<const Eigen::VectorXd>& per_sample_losses,
                                   const ContractSet& set, double bound) {
  if (per_sample_losses.size() != set.dataset_size())
    throw shape_error("contract_losses: one loss per dataset sample required");
  if (!(bound > 0.0)) throw config_error("contract_losses: bound must be positive");
  if (!per_sample_losses.allFinite())
    throw data_error("contract_losses: non-finite per-sample loss");

  ContractLossVector lv;
  lv.bound = bound;
  lv.losses.resize(set.size());
  for (int c = 0; c < set.size(); ++c) {
    const auto& contract = set.contracts[static_cast<std::size_t>(c)];
    double sum = 0.0;
    for (const int row : contract.members) sum += per_sample_losses[row];
    const double mean = sum / contract.size();
    lv.losses[c] = std::clamp(mean, 0.0, bound);
  }
  return lv;
}

void validate_distribution(const Eigen::Ref<const Eigen::VectorXd>& q, int m) {
  if (q.size() != m) throw shape_error("distribution has wrong length");
  if ((q.array() < 0.0).any()) throw input_error("distribution has negative entries");
  if (std::abs(q.sum() - 1.0) > 1e-9)
    throw input_error("distribution does not sum to 1");
}

double service_risk(const ContractLossVector& lv,
                    const Eigen::Ref<const Eigen::VectorXd>& q) {
  validate_distribution(q, static_cast<int>(lv.losses.size()));
  return q.dot(lv.losses);
}

DeviationReport risk_deviation_bound_check(const ContractLossVector& lv,
                                           const Eigen::Ref<const Eigen::VectorXd>& q,
                                           const Eigen::Ref<const Eigen::VectorXd>& q_tilde) {
  DeviationReport report;
  report.lhs = std::abs(service_risk(lv, q) - service_risk(lv, q_tilde));
  report.rhs = lv.bound * l1_deviation(q, q_tilde);
  report.holds = report.lhs <= report.rhs + 1e-12;
  return report;
}

}  // namespace osag
