#include "osag/dataset.hpp"

#include <algorithm>

#include "osag/errors.hpp"

namespace osag {

int Dataset::num_classes() const {
  if (labels.size() == 0) return 0;
  return labels.maxCoeff() + 1;
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(static_cast<std::size_t>(num_classes()), 0);
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    counts[static_cast<std::size_t>(labels[i])] += 1;
  return counts;
}

int Dataset::attr_index(const std::string& name) const {
  const auto it = std::find(attr_names.begin(), attr_names.end(), name);
  if (it == attr_names.end()) return -1;
  return static_cast<int>(it - attr_names.begin());
}

Dataset Dataset::select(const std::vector<int>& rows) const {
  Dataset out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.features.resize(n, dim());
  out.labels.resize(n);
  out.ids.reserve(rows.size());
  out.attr_names = attr_names;
  out.attr_columns.resize(attr_columns.size());
  for (auto& col : out.attr_columns) col.reserve(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int r = rows[static_cast<std::size_t>(i)];
    out.features.row(i) = features.row(r);
    out.labels[i] = labels[r];
    out.ids.push_back(ids[static_cast<std::size_t>(r)]);
    for (std::size_t a = 0; a < attr_columns.size(); ++a)
      out.attr_columns[a].push_back(attr_columns[a][static_cast<std::size_t>(r)]);
  }
  return out;
}

void Dataset::validate() const {
  const auto n = static_cast<std::size_t>(size());
  if (labels.size() != size() || ids.size() != n)
    throw shape_error("dataset: labels/ids length does not match feature rows");
  if (attr_columns.size() != attr_names.size())
    throw shape_error("dataset: attribute column count does not match names");
  for (std::size_t a = 0; a < attr_columns.size(); ++a)
    if (attr_columns[a].size() != n)
      throw shape_error("dataset: ragged attribute column '" + attr_names[a] + "'");
  if (!features.allFinite()) throw data_error("dataset: non-finite feature value");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] < 0) throw data_error("dataset: negative label");
}

}  // namespace osag
