#include "osag/sampling.hpp"

#include <vector>

#include "osag/errors.hpp"

namespace osag {

DiscreteDistribution::DiscreteDistribution(const Eigen::VectorXd& weights) {
  const int n = static_cast<int>(weights.size());
  if (n < 1) throw input_error("distribution: empty weight vector");
  if ((weights.array() < 0.0).any()) throw input_error("distribution: negative weight");
  const double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw input_error("distribution: weights must have a positive finite sum");
  probabilities_ = weights / total;

  // Walker/Vose construction over probabilities scaled by n.
  cut_ = Eigen::VectorXd::Ones(n);
  alias_ = Eigen::VectorXi::LinSpaced(n, 0, n - 1);
  Eigen::VectorXd scaled = probabilities_ * static_cast<double>(n);
  std::vector<int> small, large;
  small.reserve(static_cast<std::size_t>(n));
  large.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);
  while (!small.empty() && !large.empty()) {
    const int s = small.back();
    const int l = large.back();
    small.pop_back();
    large.pop_back();
    cut_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  // Leftovers from rounding sit at probability 1 with themselves as alias.
  for (const int i : small) cut_[i] = 1.0;
  for (const int i : large) cut_[i] = 1.0;
}

Eigen::VectorXd DiscreteDistribution::reconstructed() const {
  const int n = size();
  Eigen::VectorXd recon = cut_;
  for (int i = 0; i < n; ++i)
    if (alias_[i] != i) recon[alias_[i]] += 1.0 - cut_[i];
  return recon / static_cast<double>(n);
}

DiscreteDistribution uniform_distribution(int n) {
  if (n < 1) throw input_error("uniform_distribution: empty support");
  return DiscreteDistribution(Eigen::VectorXd::Ones(n));
}

DiscreteDistribution class_balanced_distribution(const Dataset& ds) {
  if (ds.size() == 0) throw input_error("class_balanced_distribution: empty dataset");
  const auto counts = ds.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k] == 0)
      throw input_error("class_balanced_distribution: class " + std::to_string(k) +
                        " has no samples");
  Eigen::VectorXd w(ds.size());
  const double k_inv = 1.0 / static_cast<double>(counts.size());
  for (Eigen::Index i = 0; i < ds.size(); ++i)
    w[i] = k_inv / counts[static_cast<std::size_t>(ds.labels[i])];
  return DiscreteDistribution(w);
}

Eigen::VectorXd per_sample_weights(const ContractSet& set) {
  if (!set.shares_computed) throw state_error("per_sample_weights: shares not computed");
  Eigen::VectorXd weights(set.dataset_size());
  for (const auto& c : set.contracts) {
    const double w = c.target_share / c.size();
    for (const int row : c.members) weights[row] = w;
  }
  return weights;
}

SamplingPolicy SamplingPolicy::make(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Rand:
      return {kind, 0.0, 0.0, BaselineKind::Uniform};
    case PolicyKind::ClassBalanced:
      return {kind, 0.0, 0.0, BaselineKind::ClassBalanced};
    case PolicyKind::Osag:
      return {kind, 1.0, 0.0, BaselineKind::Uniform};
    case PolicyKind::OsagMix:
      return {kind, 0.5, 0.0, BaselineKind::Uniform};
    case PolicyKind::LambdaFairloss:
      return {kind, 1.0, 1.0, BaselineKind::Uniform};
  }
  throw config_error("unknown policy kind");
}

void SamplingPolicy::validate() const {
  if (alpha < 0.0 || alpha > 1.0) throw config_error("alpha must lie in [0,1]");
  if (lambda_c < 0.0) throw config_error("lambda_c must be non-negative");
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Rand: return "rand";
    case PolicyKind::ClassBalanced: return "cb";
    case PolicyKind::Osag: return "osag";
    case PolicyKind::OsagMix: return "osag_mix";
    case PolicyKind::LambdaFairloss: return "lambda_fairloss";
  }
  throw config_error("unknown policy kind");
}

PolicyKind parse_policy(const std::string& name) {
  std::string s = name;
  for (auto& ch : s)
    if (ch == '-') ch = '_';
  if (s == "rand") return PolicyKind::Rand;
  if (s == "cb" || s == "class_balanced") return PolicyKind::ClassBalanced;
  if (s == "osag") return PolicyKind::Osag;
  if (s == "osag_mix") return PolicyKind::OsagMix;
  if (s == "lambda_fairloss") return PolicyKind::LambdaFairloss;
  throw config_error("unknown policy '" + name + "'");
}

OsagSampler::OsagSampler(const ContractSet& set)
    : set_(&set), contract_dist_(set.target_shares()) {}

int OsagSampler::step(SeededStream& stream) const {
  const int c = contract_dist_.sample(stream);
  const auto& members = set_->contracts[static_cast<std::size_t>(c)].members;
  const auto pick = stream.uniform_below(members.size());
  return members[static_cast<std::size_t>(pick)];
}

MixedSampler::MixedSampler(const ContractSet& set, DiscreteDistribution baseline,
                           double alpha)
    : osag_(set), baseline_(std::move(baseline)), alpha_(alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw config_error("alpha must lie in [0,1]");
  if (baseline_.size() != set.dataset_size())
    throw shape_error("mixed sampler: baseline must cover every sample");
}

int MixedSampler::step(SeededStream& stream) const {
  if (stream.bernoulli(alpha_)) return osag_.step(stream);
  return baseline_.sample(stream);
}

Eigen::VectorXd mixture_marginal(const ContractSet& set,
                                 const DiscreteDistribution& baseline, double alpha) {
  if (baseline.size() != set.dataset_size())
    throw shape_error("mixture_marginal: baseline must cover every sample");
  return alpha * per_sample_weights(set) + (1.0 - alpha) * baseline.probabilities();
}

}  // namespace osag
