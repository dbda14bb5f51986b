#include "osag/contracts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "osag/errors.hpp"

namespace osag {

Eigen::VectorXd ContractSet::target_shares() const {
  if (!shares_computed) throw state_error("target shares not computed");
  Eigen::VectorXd w(size());
  for (int c = 0; c < size(); ++c) w[c] = contracts[static_cast<std::size_t>(c)].target_share;
  return w;
}

Eigen::VectorXi ContractSet::contract_sizes() const {
  Eigen::VectorXi n(size());
  for (int c = 0; c < size(); ++c) n[c] = contracts[static_cast<std::size_t>(c)].size();
  return n;
}

Eigen::VectorXi ContractSet::priorities() const {
  Eigen::VectorXi p(size());
  for (int c = 0; c < size(); ++c) p[c] = contracts[static_cast<std::size_t>(c)].priority;
  return p;
}

Eigen::VectorXd ContractSet::data_frequencies() const {
  const double n_total = static_cast<double>(dataset_size());
  Eigen::VectorXd f(size());
  for (int c = 0; c < size(); ++c)
    f[c] = static_cast<double>(contracts[static_cast<std::size_t>(c)].size()) / n_total;
  return f;
}

int ContractSet::min_priority() const {
  if (!priorities_assigned()) throw state_error("priorities not assigned");
  return priorities().minCoeff();
}

int ContractSet::max_priority() const {
  if (!priorities_assigned()) throw state_error("priorities not assigned");
  return priorities().maxCoeff();
}

ContractKey ContractSet::key_for(const Dataset& ds, int row) const {
  ContractKey key;
  key.reserve(key_scheme.size() + 1);
  for (const auto& name : key_scheme) {
    const int a = ds.attr_index(name);
    if (a < 0)
      throw input_error("keying: sample " + std::to_string(ds.ids[static_cast<std::size_t>(row)]) +
                        " is missing attribute '" + name + "'");
    key.push_back(ds.attr(row, a));
  }
  const int label = ds.labels[row];
  if (label < 0 || static_cast<std::size_t>(label) >= class_rare.size())
    throw bounds_error("keying: label " + std::to_string(label) +
                       " outside the class range the contracts were built on");
  key.push_back(class_rare[static_cast<std::size_t>(label)] ? kRareTruePart : kRareFalsePart);
  return key;
}

int ContractSet::contract_of_key(const ContractKey& key) const {
  const auto it = key_index.find(key);
  return it == key_index.end() ? -1 : it->second;
}

std::vector<char> rare_class_flags(const std::vector<int>& class_counts,
                                   double rare_quantile) {
  if (rare_quantile < 0.0 || rare_quantile >= 1.0)
    throw config_error("rare_quantile must lie in [0,1)");
  const int k = static_cast<int>(class_counts.size());
  std::vector<int> order(class_counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (class_counts[static_cast<std::size_t>(a)] != class_counts[static_cast<std::size_t>(b)])
      return class_counts[static_cast<std::size_t>(a)] < class_counts[static_cast<std::size_t>(b)];
    return a < b;  // ties: lower class index counts as rarer
  });
  const int num_rare = static_cast<int>(std::ceil(rare_quantile * k));
  std::vector<char> rare(class_counts.size(), 0);
  for (int r = 0; r < num_rare && r < k; ++r) rare[static_cast<std::size_t>(order[r])] = 1;
  return rare;
}

ContractSet build_contracts(const Dataset& ds, const std::vector<std::string>& key_scheme,
                            double rare_quantile) {
  if (ds.size() == 0) throw input_error("build_contracts: empty sample list");
  ds.validate();

  ContractSet set;
  set.key_scheme = key_scheme;
  set.rare_quantile = rare_quantile;
  set.class_rare = rare_class_flags(ds.class_counts(), rare_quantile);
  set.sample_to_contract.resize(static_cast<std::size_t>(ds.size()));

  for (int row = 0; row < ds.size(); ++row) {
    ContractKey key = set.key_for(ds, row);
    auto [it, inserted] = set.key_index.try_emplace(std::move(key), set.size());
    if (inserted) {
      Contract c;
      c.key = it->first;
      set.contracts.push_back(std::move(c));
    }
    set.contracts[static_cast<std::size_t>(it->second)].members.push_back(row);
    set.sample_to_contract[static_cast<std::size_t>(row)] = it->second;
  }
  return set;
}

void assign_priorities(ContractSet& set, int rare_priority, int base_priority) {
  if (rare_priority <= 0 || base_priority <= 0)
    throw config_error("priorities must be positive");
  if (set.size() == 0) throw state_error("assign_priorities: contracts not built");
  for (auto& c : set.contracts) c.priority = c.rare() ? rare_priority : base_priority;
  set.rare_priority = rare_priority;
  set.base_priority = base_priority;
  set.shares_computed = false;  // stale after a priority change
}

void compute_target_shares(ContractSet& set) {
  if (!set.priorities_assigned()) throw state_error("compute_target_shares: priorities not assigned");
  double total = 0.0;
  for (const auto& c : set.contracts) total += static_cast<double>(c.priority) * c.size();
  for (auto& c : set.contracts)
    c.target_share = static_cast<double>(c.priority) * c.size() / total;
  set.shares_computed = true;
}

ContractSet refine_contracts(const Dataset& ds, const ContractSet& set,
                             const std::string& extra_attribute) {
  if (static_cast<Eigen::Index>(set.sample_to_contract.size()) != ds.size())
    throw shape_error("refine_contracts: set was built over a different dataset");
  if (ds.attr_index(extra_attribute) < 0)
    throw input_error("keying: missing attribute '" + extra_attribute + "'");
  std::vector<std::string> scheme = set.key_scheme;
  scheme.push_back(extra_attribute);
  ContractSet fine = build_contracts(ds, scheme, set.rare_quantile);
  if (set.priorities_assigned()) {
    assign_priorities(fine, set.rare_priority, set.base_priority);
    if (set.shares_computed) compute_target_shares(fine);
  }
  return fine;
}

ContractSet build_governed_contracts(const Dataset& ds,
                                     const std::vector<std::string>& key_scheme,
                                     double rare_quantile, int rare_priority,
                                     int base_priority) {
  ContractSet set = build_contracts(ds, key_scheme, rare_quantile);
  assign_priorities(set, rare_priority, base_priority);
  compute_target_shares(set);
  return set;
}

}  // namespace osag
