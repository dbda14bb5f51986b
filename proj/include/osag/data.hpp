#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "osag/dataset.hpp"

namespace osag {

// Stratified Gaussian-blob generator. Each (region, class) cell owns a
// center; centers are mutually separated by at least `separation`. Samples
// alternate over `subgroups` slots whose region-level offsets make region
// contracts internally heterogeneous until a refinement splits them.
struct SyntheticSpec {
  int regions = 3;
  int classes = 6;
  double rare_fraction = 0.3;   // ceil(rare_fraction * classes) rare classes
  int base_cell_count = 140;    // samples per (region, class) cell
  double rare_scale = 0.15;     // down-scaling for rare classes; must be < 1
  int subgroups = 2;
  double subgroup_spread = 0.35;  // slot offset magnitude, relative to separation
  int dim = 8;
  double separation = 3.0;
  double noise = 2.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// Attribute columns: region ("r<i>"), class ("c<k>"), subgroup ("s<j>").
Dataset generate(const SyntheticSpec& spec);

// Optional derived grid attribute: two numeric columns binned into a
// cells x cells grid, emitted as a "gx_gy" string attribute.
struct GridSpec {
  std::string x_column;
  std::string y_column;
  int cells = 4;
  std::string attribute = "cell";
};

struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string label_column;
  std::vector<std::string> attribute_columns;
  std::optional<GridSpec> grid;
};

// Header required; labels mapped to dense 0..K-1 in first-appearance order;
// every feature must parse as a finite real. Errors carry the row number.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

// Features printed with 17 significant digits so a reload is bit-exact.
void write_csv(const Dataset& ds, const std::string& path);

// Schema matching write_csv output for a given dataset.
CsvSchema schema_for(const Dataset& ds);

}  // namespace osag
