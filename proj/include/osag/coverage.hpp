#pragma once

#include <Eigen/Core>

#include <deque>
#include <vector>

#include "osag/errors.hpp"

namespace osag {

// L1 distance between two vectors or vector expressions.
template <class A, class B>
double l1_deviation(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.size() != b.size()) throw shape_error("l1_deviation: size mismatch");
  return (a.derived().template cast<double>() - b.derived().template cast<double>())
      .cwiseAbs()
      .sum();
}

// Per-contract exposure counters. With a window > 0 only the most recent
// `window` records count, otherwise the ledger is a plain running tally.
class CoverageLedger {
 public:
  explicit CoverageLedger(int num_contracts, long long window = 0)
      : counts_(static_cast<std::size_t>(num_contracts), 0), window_(window) {
    if (num_contracts < 1) throw config_error("coverage ledger needs at least one contract");
    if (window < 0) throw config_error("coverage window must be non-negative");
  }

  void record(int contract) {
    if (contract < 0 || contract >= size())
      throw bounds_error("coverage record: contract index out of range");
    counts_[static_cast<std::size_t>(contract)] += 1;
    total_ += 1;
    if (window_ > 0) {
      recent_.push_back(contract);
      if (static_cast<long long>(recent_.size()) > window_) {
        const int evicted = recent_.front();
        recent_.pop_front();
        counts_[static_cast<std::size_t>(evicted)] -= 1;
        total_ -= 1;
      }
    }
  }

  int size() const { return static_cast<int>(counts_.size()); }
  long long total() const { return total_; }
  long long window() const { return window_; }
  const std::vector<long long>& counts() const { return counts_; }

  // counts / T. Undefined before the first record.
  Eigen::VectorXd empirical_coverage() const {
    if (total_ == 0) throw state_error("empirical coverage undefined: no records");
    Eigen::VectorXd q(size());
    for (int c = 0; c < size(); ++c)
      q[c] = static_cast<double>(counts_[static_cast<std::size_t>(c)]) /
             static_cast<double>(total_);
    return q;
  }

 private:
  std::vector<long long> counts_;
  long long total_ = 0;
  long long window_ = 0;
  std::deque<int> recent_;
};

// L1 deviation of empirical coverage from the target shares; in [0,2].
inline double coverage_error(const CoverageLedger& ledger,
                             const Eigen::Ref<const Eigen::VectorXd>& target_shares) {
  if (target_shares.size() != ledger.size())
    throw shape_error("coverage_error: target share vector has wrong length");
  return l1_deviation(ledger.empirical_coverage(), target_shares);
}

inline double prio_cov_err_percent(const CoverageLedger& ledger,
                                   const Eigen::Ref<const Eigen::VectorXd>& target_shares) {
  return 100.0 * coverage_error(ledger, target_shares);
}

}  // namespace osag
