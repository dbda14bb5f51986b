#include "osag/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "osag/coverage.hpp"
#include "osag/errors.hpp"

namespace osag {

namespace {
// Stream indices: the split draws from its own child so that changing train
// hyperparameters never reshuffles the split.
constexpr std::uint64_t kSplitStreamIndex = 0;
}  // namespace

void TrainConfig::validate() const {
  policy.validate();
  if (steps < 1) throw config_error("train: steps must be >= 1");
  if (batch < 1) throw config_error("train: batch must be >= 1");
  if (!(learning_rate > 0.0)) throw config_error("train: learning rate must be > 0");
  if (weight_decay < 0.0) throw config_error("train: weight decay must be >= 0");
  if (hidden < 1) throw config_error("train: hidden width must be >= 1");
  if (!(eval_fraction > 0.0) || !(eval_fraction < 1.0))
    throw config_error("train: eval fraction must lie in (0,1)");
  if (!(loss_clip > 0.0)) throw config_error("train: loss clip must be > 0");
  if (cov_window < 0) throw config_error("train: coverage window must be >= 0");
  if (log_every < 1) throw config_error("train: log cadence must be >= 1");
}

SplitDataset stratified_split(const Dataset& ds, double eval_fraction,
                              std::uint64_t seed) {
  if (!(eval_fraction > 0.0) || !(eval_fraction < 1.0))
    throw config_error("split: eval fraction must lie in (0,1)");
  ds.validate();
  if (ds.size() < 2) throw input_error("split: need at least two samples");

  const int num_classes = ds.num_classes();
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(num_classes));
  for (int i = 0; i < ds.size(); ++i)
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);

  SeededStream stream = SeededStream(seed).child(kSplitStreamIndex);
  std::vector<int> train_rows, test_rows;
  for (auto& rows : by_class) {
    // Fisher-Yates with the shared stream; class order fixes the draw order.
    for (std::size_t i = rows.size(); i > 1; --i) {
      const auto j = stream.uniform_below(i);
      std::swap(rows[i - 1], rows[static_cast<std::size_t>(j)]);
    }
    const auto n = static_cast<long long>(rows.size());
    long long take = std::llround(eval_fraction * static_cast<double>(n));
    take = std::clamp(take, n >= 2 ? 1LL : 0LL, n - 1);
    for (long long i = 0; i < n; ++i)
      (i < take ? test_rows : train_rows).push_back(rows[static_cast<std::size_t>(i)]);
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {ds.select(train_rows), ds.select(test_rows)};
}

Evaluation evaluate(const MlpModel& model, const Dataset& test, const ContractSet& set,
                    double loss_clip) {
  if (test.size() == 0) throw input_error("evaluate: empty test set");
  if (!(loss_clip > 0.0)) throw config_error("evaluate: loss clip must be > 0");

  const ForwardLoss fwd = forward_loss(model, test.features, test.labels);
  const int m = set.size();
  const int high = set.max_priority();

  Evaluation eval;
  eval.contract_test_counts = Eigen::VectorXi::Zero(m);
  Eigen::VectorXd loss_sums = Eigen::VectorXd::Zero(m);
  long long correct_all = 0, correct_high = 0, total_high = 0;
  long long unseen_correct = 0;
  double unseen_loss_sum = 0.0;

  for (int i = 0; i < test.size(); ++i) {
    Eigen::Index predicted = 0;
    fwd.logits.row(i).maxCoeff(&predicted);
    const bool correct = static_cast<int>(predicted) == test.labels[i];
    correct_all += correct;

    const int c = set.contract_of_key(set.key_for(test, i));
    if (c < 0) {
      eval.unseen.count += 1;
      unseen_loss_sum += fwd.losses[i];
      unseen_correct += correct;
      continue;
    }
    eval.contract_test_counts[c] += 1;
    loss_sums[c] += fwd.losses[i];
    if (set.contracts[static_cast<std::size_t>(c)].priority == high) {
      total_high += 1;
      correct_high += correct;
    }
  }

  eval.acc_all = 100.0 * static_cast<double>(correct_all) / static_cast<double>(test.size());
  if (total_high > 0)
    eval.acc_high = 100.0 * static_cast<double>(correct_high) / static_cast<double>(total_high);

  eval.contract_losses.bound = loss_clip;
  eval.contract_losses.losses.resize(m);
  for (int c = 0; c < m; ++c) {
    const int n_c = eval.contract_test_counts[c];
    eval.contract_losses.losses[c] =
        n_c > 0 ? std::clamp(loss_sums[c] / n_c, 0.0, loss_clip) : 0.0;
  }
  if (eval.unseen.count > 0) {
    eval.unseen.mean_loss = unseen_loss_sum / static_cast<double>(eval.unseen.count);
    eval.unseen.accuracy =
        100.0 * static_cast<double>(unseen_correct) / static_cast<double>(eval.unseen.count);
  }
  return eval;
}

RunMetrics train(const SplitDataset& split, const ContractSet& set, const TrainConfig& cfg) {
  cfg.validate();
  if (!set.shares_computed) throw state_error("train: target shares not computed");
  if (set.dataset_size() != split.train.size())
    throw shape_error("train: contract set was not built on the train split");
  if (split.train.dim() != split.test.dim())
    throw shape_error("train: train/test feature dimensions differ");

  const int d = static_cast<int>(split.train.dim());
  const int num_classes =
      std::max(split.train.num_classes(), split.test.num_classes());

  SeededStream root(cfg.seed);
  SeededStream init_stream = root.child(1);
  SeededStream draw_stream = root.child(2);

  MlpModel model = MlpModel::init(d, cfg.hidden, num_classes, init_stream);
  AdamW optimizer(model, {cfg.learning_rate, 0.9, 0.999, 1e-8, cfg.weight_decay});

  const DiscreteDistribution baseline =
      cfg.policy.baseline == BaselineKind::ClassBalanced
          ? class_balanced_distribution(split.train)
          : uniform_distribution(static_cast<int>(split.train.size()));
  const MixedSampler sampler(set, baseline, cfg.policy.alpha);

  CoverageLedger ledger(set.size(), cfg.cov_window);
  const Eigen::VectorXd target = set.target_shares();
  const int p_min = set.min_priority();
  const int p_max = set.max_priority();

  RunMetrics metrics;
  metrics.num_contracts = set.size();
  metrics.target_shares = target;

  Eigen::MatrixXd batch_x(cfg.batch, d);
  Eigen::VectorXi batch_y(cfg.batch);
  Eigen::VectorXi batch_priority(cfg.batch);

  const long long decile = std::max<long long>(1, cfg.steps / 10);
  double first_sum = 0.0, last_sum = 0.0;
  long long first_n = 0, last_n = 0;

  for (long long step = 0; step < cfg.steps; ++step) {
    for (int b = 0; b < cfg.batch; ++b) {
      const int row = sampler.step(draw_stream);
      const int c = set.sample_to_contract[static_cast<std::size_t>(row)];
      ledger.record(c);
      batch_x.row(b) = split.train.features.row(row);
      batch_y[b] = split.train.labels[row];
      batch_priority[b] = set.contracts[static_cast<std::size_t>(c)].priority;
    }

    const ForwardLoss fwd = forward_loss(model, batch_x, batch_y);
    const Eigen::VectorXd mod =
        modulation_weights(batch_priority, cfg.policy.lambda_c, p_min, p_max);
    const double batch_loss = fwd.losses.cwiseProduct(mod).mean();
    const Gradients grads =
        backward(model, batch_x, batch_y, mod / static_cast<double>(cfg.batch));
    if (!grads.finite())
      throw data_error("train: non-finite gradient at step " + std::to_string(step));
    optimizer.step(model, grads);
    if (!model.finite())
      throw data_error("train: non-finite parameter after step " + std::to_string(step));

    if (step < decile) {
      first_sum += batch_loss;
      ++first_n;
    }
    if (step >= cfg.steps - decile) {
      last_sum += batch_loss;
      ++last_n;
    }
    if ((step + 1) % cfg.log_every == 0 || step + 1 == cfg.steps) {
      CoverageCurvePoint point;
      point.draws = (step + 1) * cfg.batch;  // cumulative, even when windowed
      point.coverage = ledger.empirical_coverage();
      point.prio_cov_err = prio_cov_err_percent(ledger, target);
      metrics.coverage_curve.push_back(std::move(point));
    }
  }

  metrics.first_decile_loss = first_sum / static_cast<double>(first_n);
  metrics.last_decile_loss = last_sum / static_cast<double>(last_n);
  metrics.total_draws = cfg.steps * cfg.batch;
  metrics.prio_cov_err = prio_cov_err_percent(ledger, target);
  metrics.eval = evaluate(model, split.test, set, cfg.loss_clip);
  metrics.acc_all = metrics.eval.acc_all;
  metrics.acc_high = metrics.eval.acc_high;
  return metrics;
}

}  // namespace osag
