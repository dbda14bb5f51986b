#pragma once

#include <Eigen/Core>

#include "osag/rng.hpp"

namespace osag {

// Single-hidden-layer perceptron [d, h, K] with rectified-linear activation.
struct MlpModel {
  Eigen::MatrixXd w1;  // h x d
  Eigen::VectorXd b1;  // h
  Eigen::MatrixXd w2;  // K x h
  Eigen::VectorXd b2;  // K

  // Weights uniform in (-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
  static MlpModel init(int input_dim, int hidden, int classes, SeededStream& stream);

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden() const { return static_cast<int>(w1.rows()); }
  int classes() const { return static_cast<int>(w2.rows()); }

  Eigen::MatrixXd logits(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
  bool finite() const;

  Eigen::Index parameter_count() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::Ref<const Eigen::VectorXd>& theta);
};

struct ForwardLoss {
  Eigen::VectorXd losses;  // per-sample cross entropy, -log softmax(logits)[label]
  Eigen::MatrixXd logits;  // batch x K
};

// Max-subtraction stabilized softmax cross entropy. Throws on non-finite
// features or out-of-range labels.
ForwardLoss forward_loss(const MlpModel& model,
                         const Eigen::Ref<const Eigen::MatrixXd>& x,
                         const Eigen::Ref<const Eigen::VectorXi>& y);

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  static Gradients zeros_like(const MlpModel& model);
  Eigen::VectorXd flatten() const;
  bool finite() const;
};

// Gradients of sum_i sample_weights[i] * loss_i.
Gradients backward(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                   const Eigen::Ref<const Eigen::VectorXi>& y,
                   const Eigen::Ref<const Eigen::VectorXd>& sample_weights);

// Per-sample up-weighting factors 1 + lambda_c * s_i with the normalized
// priority score s_i = (priority_i - p_min) / (p_max - p_min); s_i = 0 when
// the level set is degenerate.
Eigen::VectorXd modulation_weights(const Eigen::Ref<const Eigen::VectorXi>& priorities,
                                   double lambda_c, int priority_min, int priority_max);

// mean_i loss_i * (1 + lambda_c * s_i); plain mean cross entropy at lambda 0.
double modulated_loss(const Eigen::Ref<const Eigen::VectorXd>& losses,
                      const Eigen::Ref<const Eigen::VectorXi>& priorities,
                      double lambda_c, int priority_min, int priority_max);

struct AdamWConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-4;
};

// Adam with decoupled weight decay: the decay term scales the parameter
// directly by lr * wd instead of entering the moment estimates.
class AdamW {
 public:
  AdamW(const MlpModel& shape, AdamWConfig config);

  void step(MlpModel& model, const Gradients& grads);
  long long steps_taken() const { return t_; }
  const AdamWConfig& config() const { return config_; }

 private:
  AdamWConfig config_;
  long long t_ = 0;
  Gradients first_;   // first-moment estimates
  Gradients second_;  // second-moment estimates
};

}  // namespace osag
