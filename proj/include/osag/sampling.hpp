#pragma once

#include <Eigen/Core>

#include <string>

#include "osag/contracts.hpp"
#include "osag/dataset.hpp"
#include "osag/rng.hpp"

namespace osag {

// Walker/Vose alias table over a finite distribution. Sampling is O(1) and
// consumes exactly one draw.
class DiscreteDistribution {
 public:
  // Normalizes the weights. Throws on empty input, negative entries, or a
  // non-positive sum.
  explicit DiscreteDistribution(const Eigen::VectorXd& weights);

  int size() const { return static_cast<int>(probabilities_.size()); }
  const Eigen::VectorXd& probabilities() const { return probabilities_; }

  // Cell layout of the alias table (probability row and alias row).
  const Eigen::VectorXd& cell_probability() const { return cut_; }
  const Eigen::VectorXi& cell_alias() const { return alias_; }

  int sample(SeededStream& stream) const {
    const double x = stream.next_unit() * size();
    int cell = static_cast<int>(x);
    if (cell >= size()) cell = size() - 1;
    return (x - cell) < cut_[cell] ? cell : alias_[cell];
  }

  // Probabilities implied by enumerating the table's cells; equals
  // probabilities() up to representation rounding.
  Eigen::VectorXd reconstructed() const;

 private:
  Eigen::VectorXd probabilities_;
  Eigen::VectorXd cut_;    // per-cell acceptance threshold in [0,1]
  Eigen::VectorXi alias_;  // per-cell alternative outcome
};

DiscreteDistribution uniform_distribution(int n);

// Inverse-frequency sampling over rows: a row of class k gets probability
// (1/K) / count(k), so classes are equiprobable in the marginal.
DiscreteDistribution class_balanced_distribution(const Dataset& ds);

// Normalized one-stage weight vector: row i in contract c gets w_c / n_c.
// Alias-sampling this vector is equivalent to the two-stage sampler.
Eigen::VectorXd per_sample_weights(const ContractSet& set);

enum class PolicyKind { Rand, ClassBalanced, Osag, OsagMix, LambdaFairloss };
enum class BaselineKind { Uniform, ClassBalanced };

// A named sampling policy with its mixture and loss-modulation knobs.
struct SamplingPolicy {
  PolicyKind kind = PolicyKind::Rand;
  double alpha = 0.0;     // probability of the governed (two-stage) path
  double lambda_c = 0.0;  // contract-aware loss modulation weight
  BaselineKind baseline = BaselineKind::Uniform;

  // Canonical knobs per kind: rand (0,0), cb (0,0, class-balanced baseline),
  // osag (1,0), osag_mix (0.5,0), lambda_fairloss (1,1). All overridable.
  static SamplingPolicy make(PolicyKind kind);

  void validate() const;  // alpha in [0,1], lambda_c >= 0
};

std::string policy_name(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);

// Two-stage sampler: draw a contract by target share, then a member uniformly.
// The marginal of row i in contract c is exactly w_c / n_c, and each step
// consumes exactly two draws.
class OsagSampler {
 public:
  explicit OsagSampler(const ContractSet& set);

  int step(SeededStream& stream) const;
  const ContractSet& set() const { return *set_; }

 private:
  const ContractSet* set_;  // not owned; must outlive the sampler
  DiscreteDistribution contract_dist_;
};

// Per-step Bernoulli(alpha) mixture: the governed path with probability
// alpha, otherwise one draw from the baseline distribution over rows. The
// mixture draw is consumed every step, so sequences with different alpha stay
// aligned.
class MixedSampler {
 public:
  MixedSampler(const ContractSet& set, DiscreteDistribution baseline, double alpha);

  int step(SeededStream& stream) const;
  double alpha() const { return alpha_; }
  const OsagSampler& governed() const { return osag_; }

 private:
  OsagSampler osag_;
  DiscreteDistribution baseline_;
  double alpha_;
};

inline int osag_step(const OsagSampler& sampler, SeededStream& stream) {
  return sampler.step(stream);
}
inline int mixed_step(const MixedSampler& sampler, SeededStream& stream) {
  return sampler.step(stream);
}

// Closed-form per-row marginal alpha * w_c/n_c + (1-alpha) * baseline(i);
// the oracle the empirical samplers are checked against.
Eigen::VectorXd mixture_marginal(const ContractSet& set,
                                 const DiscreteDistribution& baseline,
                                 double alpha);

}  // namespace osag
