#pragma once

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

#include "osag/dataset.hpp"

namespace osag {

// A contract key is an ordered list of attribute values, with a rare-flag
// part appended last. Keys compare part-by-part, in order.
using ContractKey = std::vector<std::string>;

inline constexpr const char* kRareTruePart = "rare=true";
inline constexpr const char* kRareFalsePart = "rare=false";

struct Contract {
  ContractKey key;
  std::vector<int> members;  // row indices into the dataset the set was built on
  int priority = 0;          // 0 until assigned
  double target_share = 0.0;

  int size() const { return static_cast<int>(members.size()); }
  bool rare() const { return !key.empty() && key.back() == kRareTruePart; }
};

// Partition of a dataset into keyed contracts, carrying the keying metadata
// needed to place further samples (e.g. a held-out split) under the same
// scheme: the attribute list, the rare quantile, and the per-class rare flag.
struct ContractSet {
  std::vector<Contract> contracts;
  std::vector<int> sample_to_contract;  // by row of the source dataset
  std::map<ContractKey, int> key_index;

  std::vector<std::string> key_scheme;  // attribute names; rare flag appended last
  double rare_quantile = 0.0;
  std::vector<char> class_rare;  // indexed by label
  int base_priority = 0;
  int rare_priority = 0;
  bool shares_computed = false;

  int size() const { return static_cast<int>(contracts.size()); }
  Eigen::Index dataset_size() const {
    return static_cast<Eigen::Index>(sample_to_contract.size());
  }
  bool priorities_assigned() const { return base_priority > 0 && rare_priority > 0; }

  Eigen::VectorXd target_shares() const;   // throws until compute_target_shares ran
  Eigen::VectorXi contract_sizes() const;  // n_c
  Eigen::VectorXi priorities() const;
  Eigen::VectorXd data_frequencies() const;  // n_c / N
  int min_priority() const;
  int max_priority() const;

  // Key a sample of a compatible dataset under this set's scheme.
  ContractKey key_for(const Dataset& ds, int row) const;
  // Contract index for a key, -1 when the key was never materialized.
  int contract_of_key(const ContractKey& key) const;
};

// Per-class rare flags: classes sorted ascending by count (ties broken by
// lower class index counted as rarer); the bottom ceil(quantile * K) classes
// are rare.
std::vector<char> rare_class_flags(const std::vector<int>& class_counts,
                                   double rare_quantile);

// One contract per distinct (scheme attributes..., rare flag) key, in first
// appearance order. Every sample lands in exactly one contract.
ContractSet build_contracts(const Dataset& ds,
                            const std::vector<std::string>& key_scheme,
                            double rare_quantile);

// Contracts whose key carries rare=true get rare_priority, the rest
// base_priority. Invalidates previously computed shares.
void assign_priorities(ContractSet& set, int rare_priority, int base_priority);

// w_c = priority_c * n_c / sum_c' priority_c' * n_c'.
void compute_target_shares(ContractSet& set);

// Split every contract by an extra attribute, then re-apply the rare flag,
// priority, and share rules. The result strictly refines the input partition.
ContractSet refine_contracts(const Dataset& ds, const ContractSet& set,
                             const std::string& extra_attribute);

// build + assign + shares in one call.
ContractSet build_governed_contracts(const Dataset& ds,
                                     const std::vector<std::string>& key_scheme,
                                     double rare_quantile, int rare_priority,
                                     int base_priority);

}  // namespace osag
