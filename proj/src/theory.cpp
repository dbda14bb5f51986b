#include "osag/theory.hpp"

#include <cmath>

#include "osag/errors.hpp"
#include "osag/rng.hpp"
#include "osag/sampling.hpp"

namespace osag {

namespace {

double binomial_stderr(double rate, int trials) {
  return std::sqrt(rate * (1.0 - rate) / trials);
}

// One pass of `trials` i.i.d. draw sequences of length `steps`, evaluated
// against every epsilon at once.
std::vector<ConcentrationReport> run_cell(const Eigen::VectorXd& w, long long steps,
                                          const std::vector<double>& epsilons,
                                          int trials, std::uint64_t seed) {
  if (steps < 1) throw config_error("concentration: steps must be >= 1");
  if (trials < 1) throw config_error("concentration: trials must be >= 1");
  for (const double eps : epsilons)
    if (!(eps > 0.0)) throw config_error("concentration: epsilon must be > 0");

  const int m = static_cast<int>(w.size());
  const DiscreteDistribution dist(w);
  const SeededStream root(seed);

  const auto num_eps = epsilons.size();
  std::vector<Eigen::VectorXi> violation_counts(num_eps, Eigen::VectorXi::Zero(m));
  std::vector<int> union_counts(num_eps, 0);

  Eigen::VectorXd qhat(m);
  std::vector<long long> counts(static_cast<std::size_t>(m));
  for (int t = 0; t < trials; ++t) {
    SeededStream stream = root.child(static_cast<std::uint64_t>(t));
    std::fill(counts.begin(), counts.end(), 0LL);
    for (long long s = 0; s < steps; ++s)
      counts[static_cast<std::size_t>(dist.sample(stream))] += 1;
    for (int c = 0; c < m; ++c)
      qhat[c] = static_cast<double>(counts[static_cast<std::size_t>(c)]) /
                static_cast<double>(steps);
    const Eigen::VectorXd deviation = (qhat - dist.probabilities()).cwiseAbs();
    const double cov_err = deviation.sum();
    for (std::size_t e = 0; e < num_eps; ++e) {
      for (int c = 0; c < m; ++c)
        if (deviation[c] >= epsilons[e]) violation_counts[e][c] += 1;
      if (cov_err >= m * epsilons[e]) union_counts[e] += 1;
    }
  }

  std::vector<ConcentrationReport> reports;
  reports.reserve(num_eps);
  for (std::size_t e = 0; e < num_eps; ++e) {
    ConcentrationReport r;
    r.m = m;
    r.steps = steps;
    r.epsilon = epsilons[e];
    r.trials = trials;
    const double tail = 2.0 * std::exp(-2.0 * static_cast<double>(steps) *
                                       epsilons[e] * epsilons[e]);
    r.hoeffding_bound = tail;
    r.union_bound = m * tail;
    r.per_contract_violation_rate =
        violation_counts[e].cast<double>() / static_cast<double>(trials);
    r.per_contract_stderr.resize(m);
    r.per_contract_hold = true;
    for (int c = 0; c < m; ++c) {
      r.per_contract_stderr[c] = binomial_stderr(r.per_contract_violation_rate[c], trials);
      if (r.per_contract_violation_rate[c] >
          r.hoeffding_bound + 3.0 * r.per_contract_stderr[c])
        r.per_contract_hold = false;
    }
    r.union_event_rate = static_cast<double>(union_counts[e]) / trials;
    r.union_stderr = binomial_stderr(r.union_event_rate, trials);
    r.union_holds = r.union_event_rate <= r.union_bound + 3.0 * r.union_stderr;
    r.holds = r.per_contract_hold && r.union_holds;
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace

ConcentrationReport run_concentration_trials(const Eigen::VectorXd& target_shares,
                                             long long steps, double epsilon,
                                             int trials, std::uint64_t seed) {
  return run_cell(target_shares, steps, {epsilon}, trials, seed).front();
}

std::vector<ConcentrationReport> concentration_grid(
    const Eigen::VectorXd& target_shares, const std::vector<long long>& step_grid,
    const std::vector<double>& epsilons, int trials, std::uint64_t seed) {
  std::vector<ConcentrationReport> all;
  std::uint64_t cell = 0;
  for (const long long steps : step_grid) {
    auto reports =
        run_cell(target_shares, steps, epsilons, trials, SeededStream(seed).child(cell).seed());
    ++cell;
    for (auto& r : reports) all.push_back(std::move(r));
  }
  return all;
}

std::vector<DecayPoint> coverage_decay_curve(const Eigen::VectorXd& target_shares,
                                             const std::vector<long long>& step_grid,
                                             int trials, std::uint64_t seed) {
  if (step_grid.empty()) throw config_error("decay curve: empty step grid");
  for (std::size_t i = 1; i < step_grid.size(); ++i)
    if (step_grid[i] <= step_grid[i - 1])
      throw config_error("decay curve: step grid must be ascending");
  if (trials < 2) throw config_error("decay curve: need at least two trials");

  const int m = static_cast<int>(target_shares.size());
  const DiscreteDistribution dist(target_shares);
  const SeededStream root(seed);
  const long long max_steps = step_grid.back();

  std::vector<double> sum(step_grid.size(), 0.0);
  std::vector<double> sum_sq(step_grid.size(), 0.0);
  std::vector<long long> counts(static_cast<std::size_t>(m));
  for (int t = 0; t < trials; ++t) {
    SeededStream stream = root.child(static_cast<std::uint64_t>(t));
    std::fill(counts.begin(), counts.end(), 0LL);
    std::size_t next_grid = 0;
    for (long long s = 1; s <= max_steps; ++s) {
      counts[static_cast<std::size_t>(dist.sample(stream))] += 1;
      if (s == step_grid[next_grid]) {
        double cov_err = 0.0;
        for (int c = 0; c < m; ++c)
          cov_err += std::abs(static_cast<double>(counts[static_cast<std::size_t>(c)]) / s -
                              dist.probabilities()[c]);
        sum[next_grid] += cov_err;
        sum_sq[next_grid] += cov_err * cov_err;
        ++next_grid;
      }
    }
  }

  std::vector<DecayPoint> curve;
  curve.reserve(step_grid.size());
  for (std::size_t g = 0; g < step_grid.size(); ++g) {
    DecayPoint p;
    p.steps = step_grid[g];
    p.mean_cov_err = sum[g] / trials;
    const double var =
        (sum_sq[g] - trials * p.mean_cov_err * p.mean_cov_err) / (trials - 1);
    p.stddev = std::sqrt(std::max(0.0, var));
    curve.push_back(p);
  }
  return curve;
}

}  // namespace osag
