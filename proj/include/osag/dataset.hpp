#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace osag {

// Column-oriented labeled dataset: an Eigen feature matrix plus string
// attribute columns (region, class name, subgroup, ...) used for contract
// keying. Labels are dense class indices in [0, K).
struct Dataset {
  Eigen::MatrixXd features;                            // n x d
  Eigen::VectorXi labels;                              // n
  std::vector<std::int64_t> ids;                       // n, unique
  std::vector<std::string> attr_names;                 // keying attributes
  std::vector<std::vector<std::string>> attr_columns;  // one column per name

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  int num_classes() const;
  std::vector<int> class_counts() const;

  // Index of an attribute column, -1 when absent.
  int attr_index(const std::string& name) const;

  const std::string& attr(int row, int column) const {
    return attr_columns[static_cast<std::size_t>(column)][static_cast<std::size_t>(row)];
  }

  // New dataset containing the given rows, in order. Ids are preserved.
  Dataset select(const std::vector<int>& rows) const;

  // Throws on non-finite features, ragged columns, or negative labels.
  void validate() const;
};

}  // namespace osag
