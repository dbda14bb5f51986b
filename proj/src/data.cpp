#include "osag/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "osag/errors.hpp"
#include "osag/rng.hpp"

namespace osag {

namespace {

int num_rare_classes(const SyntheticSpec& spec) {
  return static_cast<int>(std::ceil(spec.rare_fraction * spec.classes));
}

int rare_cell_count(const SyntheticSpec& spec) {
  return std::max(1, static_cast<int>(std::llround(spec.rare_scale * spec.base_cell_count)));
}

Eigen::VectorXd gaussian_vector(int dim, SeededStream& stream) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = stream.next_gaussian();
  return v;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (classes < 2) throw config_error("synthetic: need at least two classes");
  if (regions < 1) throw config_error("synthetic: need at least one region");
  if (dim < 2) throw config_error("synthetic: feature dimension must be >= 2");
  if (base_cell_count < 1) throw config_error("synthetic: zero cell count");
  if (subgroups < 1) throw config_error("synthetic: need at least one subgroup");
  if (rare_fraction < 0.0 || rare_fraction >= 1.0)
    throw config_error("synthetic: rare fraction must lie in [0,1)");
  if (!(separation > 0.0)) throw config_error("synthetic: separation must be > 0");
  if (noise < 0.0) throw config_error("synthetic: noise must be >= 0");
  if (subgroup_spread < 0.0) throw config_error("synthetic: subgroup spread must be >= 0");
  if (num_rare_classes(*this) > 0) {
    if (!(rare_scale > 0.0) || rare_scale >= 1.0)
      throw config_error("synthetic: rare scale must lie in (0,1)");
    if (rare_cell_count(*this) >= base_cell_count)
      throw config_error("synthetic: rare cells must be strictly smaller than common ones");
  }
}

Dataset generate(const SyntheticSpec& spec) {
  spec.validate();
  SeededStream stream(spec.seed);

  const int cells = spec.regions * spec.classes;
  const int n_rare = num_rare_classes(spec);
  const double box = spec.separation * (1.0 + std::pow(cells, 1.0 / spec.dim));

  // Cell centers at least `separation` apart, by rejection inside a box whose
  // volume grows with the cell count.
  std::vector<Eigen::VectorXd> centers;
  centers.reserve(static_cast<std::size_t>(cells));
  for (int cell = 0; cell < cells; ++cell) {
    Eigen::VectorXd candidate(spec.dim);
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      for (int i = 0; i < spec.dim; ++i)
        candidate[i] = box * (2.0 * stream.next_unit() - 1.0);
      placed = std::all_of(centers.begin(), centers.end(), [&](const auto& c) {
        return (c - candidate).norm() >= spec.separation;
      });
    }
    if (!placed)
      throw config_error("synthetic: could not place separated centers; lower separation");
    centers.push_back(candidate);
  }

  // Region-level subgroup offsets, shared across classes, so a region mixes
  // `subgroups` shifted populations until a refinement splits them.
  std::vector<Eigen::VectorXd> offsets;
  offsets.reserve(static_cast<std::size_t>(spec.regions * spec.subgroups));
  for (int r = 0; r < spec.regions; ++r)
    for (int s = 0; s < spec.subgroups; ++s) {
      Eigen::VectorXd direction = gaussian_vector(spec.dim, stream);
      direction.normalize();
      offsets.push_back(spec.subgroup_spread * spec.separation * direction);
    }

  long long total = 0;
  for (int k = 0; k < spec.classes; ++k) {
    const bool rare = k >= spec.classes - n_rare;
    total += static_cast<long long>(spec.regions) *
             (rare ? rare_cell_count(spec) : spec.base_cell_count);
  }

  Dataset ds;
  ds.features.resize(total, spec.dim);
  ds.labels.resize(total);
  ds.ids.reserve(static_cast<std::size_t>(total));
  ds.attr_names = {"region", "class", "subgroup"};
  ds.attr_columns.assign(3, {});
  for (auto& col : ds.attr_columns) col.reserve(static_cast<std::size_t>(total));

  Eigen::Index row = 0;
  for (int r = 0; r < spec.regions; ++r)
    for (int k = 0; k < spec.classes; ++k) {
      const bool rare = k >= spec.classes - n_rare;
      const int count = rare ? rare_cell_count(spec) : spec.base_cell_count;
      const auto& center = centers[static_cast<std::size_t>(r * spec.classes + k)];
      for (int i = 0; i < count; ++i, ++row) {
        const int slot = i % spec.subgroups;
        const auto& offset =
            offsets[static_cast<std::size_t>(r * spec.subgroups + slot)];
        ds.features.row(row) =
            (center + offset + spec.noise * gaussian_vector(spec.dim, stream)).transpose();
        ds.labels[row] = k;
        ds.ids.push_back(row);
        ds.attr_columns[0].push_back("r" + std::to_string(r));
        ds.attr_columns[1].push_back("c" + std::to_string(k));
        ds.attr_columns[2].push_back("s" + std::to_string(slot));
      }
    }
  ds.validate();
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ostringstream out;
  for (Eigen::Index j = 0; j < ds.dim(); ++j) out << 'f' << j << ',';
  out << "label";
  for (const auto& name : ds.attr_names) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) out << format_double(ds.features(i, j)) << ',';
    out << ds.labels[i];
    for (std::size_t a = 0; a < ds.attr_columns.size(); ++a)
      out << ',' << ds.attr_columns[a][static_cast<std::size_t>(i)];
    out << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw io_error("cannot open '" + path + "' for writing");
  file << out.str();
  if (!file) throw io_error("failed writing '" + path + "'");
}

CsvSchema schema_for(const Dataset& ds) {
  CsvSchema schema;
  for (Eigen::Index j = 0; j < ds.dim(); ++j)
    schema.feature_columns.push_back("f" + std::to_string(j));
  schema.label_column = "label";
  schema.attribute_columns = ds.attr_names;
  return schema;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (const char ch : line) {
    if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

double parse_double(const std::string& text, long long row, const std::string& column) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw io_error("row " + std::to_string(row) + ": cannot parse '" + text +
                   "' in column '" + column + "'");
  if (!std::isfinite(value))
    throw io_error("row " + std::to_string(row) + ": non-finite value in column '" +
                   column + "'");
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw io_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(file, line)) throw io_error("'" + path + "': empty file");
  const auto header = split_line(line);
  std::map<std::string, int> column_of;
  for (std::size_t i = 0; i < header.size(); ++i)
    column_of.emplace(header[i], static_cast<int>(i));

  const auto require = [&](const std::string& name) {
    const auto it = column_of.find(name);
    if (it == column_of.end())
      throw io_error("'" + path + "': missing column '" + name + "'");
    return it->second;
  };

  std::vector<int> feature_cols;
  for (const auto& name : schema.feature_columns) feature_cols.push_back(require(name));
  const int label_col = require(schema.label_column);
  std::vector<int> attr_cols;
  for (const auto& name : schema.attribute_columns) attr_cols.push_back(require(name));
  int grid_x = -1, grid_y = -1;
  if (schema.grid) {
    grid_x = require(schema.grid->x_column);
    grid_y = require(schema.grid->y_column);
    if (schema.grid->cells < 1) throw config_error("grid: cells must be >= 1");
  }

  const auto d = static_cast<Eigen::Index>(feature_cols.size());
  std::vector<Eigen::VectorXd> rows;
  std::vector<int> labels;
  std::map<std::string, int> label_of;  // first-appearance dense mapping
  std::vector<std::vector<std::string>> attr_columns(schema.attribute_columns.size());
  std::vector<double> grid_xs, grid_ys;

  long long row_number = 1;  // header was row 1
  while (std::getline(file, line)) {
    ++row_number;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size())
      throw io_error("row " + std::to_string(row_number) + ": expected " +
                     std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
    Eigen::VectorXd features(d);
    for (Eigen::Index j = 0; j < d; ++j)
      features[j] = parse_double(fields[static_cast<std::size_t>(feature_cols[j])],
                                 row_number, schema.feature_columns[static_cast<std::size_t>(j)]);
    rows.push_back(std::move(features));
    const auto& label_text = fields[static_cast<std::size_t>(label_col)];
    const auto [it, inserted] =
        label_of.try_emplace(label_text, static_cast<int>(label_of.size()));
    labels.push_back(it->second);
    for (std::size_t a = 0; a < attr_cols.size(); ++a)
      attr_columns[a].push_back(fields[static_cast<std::size_t>(attr_cols[a])]);
    if (schema.grid) {
      grid_xs.push_back(parse_double(fields[static_cast<std::size_t>(grid_x)], row_number,
                                     schema.grid->x_column));
      grid_ys.push_back(parse_double(fields[static_cast<std::size_t>(grid_y)], row_number,
                                     schema.grid->y_column));
    }
  }
  if (rows.empty()) throw io_error("'" + path + "': no data rows");

  Dataset ds;
  const auto n = static_cast<Eigen::Index>(rows.size());
  ds.features.resize(n, d);
  ds.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.features.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    ds.labels[i] = labels[static_cast<std::size_t>(i)];
    ds.ids.push_back(i);
  }
  ds.attr_names = schema.attribute_columns;
  ds.attr_columns = std::move(attr_columns);

  if (schema.grid) {
    const int g = schema.grid->cells;
    const auto [x_min, x_max] = std::minmax_element(grid_xs.begin(), grid_xs.end());
    const auto [y_min, y_max] = std::minmax_element(grid_ys.begin(), grid_ys.end());
    const auto bin = [g](double v, double lo, double hi) {
      if (hi <= lo) return 0;
      const int b = static_cast<int>((v - lo) / (hi - lo) * g);
      return std::clamp(b, 0, g - 1);
    };
    std::vector<std::string> cells;
    cells.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      cells.push_back("g" + std::to_string(bin(grid_xs[idx], *x_min, *x_max)) + "_" +
                      std::to_string(bin(grid_ys[idx], *y_min, *y_max)));
    }
    ds.attr_names.push_back(schema.grid->attribute);
    ds.attr_columns.push_back(std::move(cells));
  }

  ds.validate();
  return ds;
}

}  // namespace osag
