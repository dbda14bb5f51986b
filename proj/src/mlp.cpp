#include "osag/mlp.hpp"

#include <cmath>

#include "osag/errors.hpp"

namespace osag {

namespace {

void fill_fan_in_uniform(Eigen::MatrixXd& w, SeededStream& stream) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(w.cols()));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      w(r, c) = scale * (2.0 * stream.next_unit() - 1.0);
}

struct ForwardCache {
  Eigen::MatrixXd hidden;  // batch x h, post-activation
  Eigen::MatrixXd logits;  // batch x K
};

ForwardCache forward(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  ForwardCache cache;
  cache.hidden = ((x * model.w1.transpose()).rowwise() + model.b1.transpose()).cwiseMax(0.0);
  cache.logits = (cache.hidden * model.w2.transpose()).rowwise() + model.b2.transpose();
  return cache;
}

Eigen::VectorXd losses_from_logits(const Eigen::MatrixXd& logits,
                                   const Eigen::Ref<const Eigen::VectorXi>& y) {
  const Eigen::Index batch = logits.rows();
  Eigen::VectorXd losses(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double peak = logits.row(i).maxCoeff();
    const double lse = peak + std::log((logits.row(i).array() - peak).exp().sum());
    losses[i] = lse - logits(i, y[i]);
  }
  return losses;
}

}  // namespace

MlpModel MlpModel::init(int input_dim, int hidden, int classes, SeededStream& stream) {
  if (input_dim < 1 || hidden < 1 || classes < 2)
    throw config_error("mlp: need input_dim >= 1, hidden >= 1, classes >= 2");
  MlpModel model;
  model.w1.resize(hidden, input_dim);
  model.b1 = Eigen::VectorXd::Zero(hidden);
  model.w2.resize(classes, hidden);
  model.b2 = Eigen::VectorXd::Zero(classes);
  fill_fan_in_uniform(model.w1, stream);
  fill_fan_in_uniform(model.w2, stream);
  return model;
}

Eigen::MatrixXd MlpModel::logits(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (x.cols() != input_dim()) throw shape_error("mlp: feature dimension mismatch");
  return forward(*this, x).logits;
}

bool MlpModel::finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

Eigen::Index MlpModel::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

Eigen::VectorXd MlpModel::flatten() const {
  Eigen::VectorXd theta(parameter_count());
  Eigen::Index offset = 0;
  const auto put = [&](const auto& block) {
    theta.segment(offset, block.size()) =
        Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
    offset += block.size();
  };
  put(w1);
  put(b1);
  put(w2);
  put(b2);
  return theta;
}

void MlpModel::unflatten(const Eigen::Ref<const Eigen::VectorXd>& theta) {
  if (theta.size() != parameter_count()) throw shape_error("mlp: bad parameter vector length");
  Eigen::Index offset = 0;
  const auto take = [&](auto& block) {
    Eigen::Map<Eigen::VectorXd>(block.data(), block.size()) =
        theta.segment(offset, block.size());
    offset += block.size();
  };
  take(w1);
  take(b1);
  take(w2);
  take(b2);
}

ForwardLoss forward_loss(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                         const Eigen::Ref<const Eigen::VectorXi>& y) {
  if (x.cols() != model.input_dim()) throw shape_error("forward_loss: feature dimension mismatch");
  if (y.size() != x.rows()) throw shape_error("forward_loss: one label per row required");
  if (!x.allFinite()) throw data_error("forward_loss: non-finite input feature");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] < 0 || y[i] >= model.classes())
      throw bounds_error("forward_loss: label out of range");

  ForwardLoss out;
  ForwardCache cache = forward(model, x);
  out.losses = losses_from_logits(cache.logits, y);
  out.logits = std::move(cache.logits);
  return out;
}

Gradients Gradients::zeros_like(const MlpModel& model) {
  Gradients g;
  g.w1 = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
  g.b1 = Eigen::VectorXd::Zero(model.b1.size());
  g.w2 = Eigen::MatrixXd::Zero(model.w2.rows(), model.w2.cols());
  g.b2 = Eigen::VectorXd::Zero(model.b2.size());
  return g;
}

Eigen::VectorXd Gradients::flatten() const {
  Eigen::VectorXd v(w1.size() + b1.size() + w2.size() + b2.size());
  Eigen::Index offset = 0;
  const auto put = [&](const auto& block) {
    v.segment(offset, block.size()) =
        Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
    offset += block.size();
  };
  put(w1);
  put(b1);
  put(w2);
  put(b2);
  return v;
}

bool Gradients::finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

Gradients backward(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x,
                   const Eigen::Ref<const Eigen::VectorXi>& y,
                   const Eigen::Ref<const Eigen::VectorXd>& sample_weights) {
  const Eigen::Index batch = x.rows();
  if (sample_weights.size() != batch)
    throw shape_error("backward: one weight per sample required");

  const ForwardCache cache = forward(model, x);

  // d(sum_i w_i loss_i)/dlogits = w_i * (softmax_i - onehot_i)
  Eigen::MatrixXd dlogits(batch, model.classes());
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double peak = cache.logits.row(i).maxCoeff();
    Eigen::RowVectorXd p = (cache.logits.row(i).array() - peak).exp();
    p /= p.sum();
    p[y[i]] -= 1.0;
    dlogits.row(i) = sample_weights[i] * p;
  }

  Gradients g;
  g.w2 = dlogits.transpose() * cache.hidden;
  g.b2 = dlogits.colwise().sum();
  Eigen::MatrixXd dhidden = (dlogits * model.w2).array() *
                            (cache.hidden.array() > 0.0).cast<double>();
  g.w1 = dhidden.transpose() * x;
  g.b1 = dhidden.colwise().sum();
  return g;
}

Eigen::VectorXd modulation_weights(const Eigen::Ref<const Eigen::VectorXi>& priorities,
                                   double lambda_c, int priority_min, int priority_max) {
  if (lambda_c < 0.0) throw config_error("lambda_c must be non-negative");
  for (Eigen::Index i = 0; i < priorities.size(); ++i)
    if (priorities[i] <= 0) throw config_error("priorities must be positive");
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(priorities.size());
  if (priority_max > priority_min) {
    const double span = priority_max - priority_min;
    for (Eigen::Index i = 0; i < priorities.size(); ++i)
      weights[i] += lambda_c * (priorities[i] - priority_min) / span;
  }
  return weights;
}

double modulated_loss(const Eigen::Ref<const Eigen::VectorXd>& losses,
                      const Eigen::Ref<const Eigen::VectorXi>& priorities,
                      double lambda_c, int priority_min, int priority_max) {
  if (losses.size() != priorities.size())
    throw shape_error("modulated_loss: one priority per loss required");
  const Eigen::VectorXd weights =
      modulation_weights(priorities, lambda_c, priority_min, priority_max);
  return losses.cwiseProduct(weights).mean();
}

AdamW::AdamW(const MlpModel& shape, AdamWConfig config)
    : config_(config),
      first_(Gradients::zeros_like(shape)),
      second_(Gradients::zeros_like(shape)) {
  if (!(config.learning_rate > 0.0)) throw config_error("adamw: learning rate must be > 0");
}

void AdamW::step(MlpModel& model, const Gradients& grads) {
  ++t_;
  const double bias1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  const double decay = config_.learning_rate * config_.weight_decay;

  const auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = config_.beta1 * m + (1.0 - config_.beta1) * g;
    v = (config_.beta2 * v.array() + (1.0 - config_.beta2) * g.array().square()).matrix();
    const auto m_hat = m.array() / bias1;
    const auto v_hat = v.array() / bias2;
    param.array() -= config_.learning_rate * m_hat / (v_hat.sqrt() + config_.epsilon);
    param.array() -= decay * param.array();
  };
  update(model.w1, first_.w1, second_.w1, grads.w1);
  update(model.b1, first_.b1, second_.b1, grads.b1);
  update(model.w2, first_.w2, second_.w2, grads.w2);
  update(model.b2, first_.b2, second_.b2, grads.b2);
}

}  // namespace osag
