#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "osag/data.hpp"
#include "osag/errors.hpp"
#include "osag/report.hpp"

using namespace osag;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("osag_data_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("data") {

TEST_CASE("generated counts follow the requested cell sizes") {
  SyntheticSpec spec;
  spec.regions = 2;
  spec.classes = 5;
  spec.rare_fraction = 0.2;  // exactly one rare class
  spec.base_cell_count = 40;
  spec.rare_scale = 0.25;
  spec.dim = 3;
  const Dataset ds = generate(spec);

  const auto counts = ds.class_counts();
  REQUIRE(counts.size() == 5);
  for (int k = 0; k < 4; ++k) CHECK(counts[static_cast<std::size_t>(k)] == 80);
  CHECK(counts[4] == 20);  // the single rare class, down-scaled per region
  CHECK(ds.size() == 4 * 80 + 20);
  CHECK(ds.dim() == 3);
  CHECK(ds.attr_index("region") == 0);
  CHECK(ds.attr_index("class") == 1);
  CHECK(ds.attr_index("subgroup") == 2);
}

TEST_CASE("identical seeds generate identical datasets") {
  const SyntheticSpec spec;
  const Dataset a = generate(spec);
  const Dataset b = generate(spec);
  CHECK((a.features.array() == b.features.array()).all());
  CHECK(a.ids == b.ids);
  CHECK(a.attr_columns == b.attr_columns);

  SyntheticSpec other = spec;
  other.seed += 1;
  const Dataset c = generate(other);
  CHECK_FALSE((a.features.array() == c.features.array()).all());
}

TEST_CASE("zero noise keeps every cell on its center") {
  SyntheticSpec spec;
  spec.noise = 0.0;
  spec.subgroup_spread = 0.0;
  spec.regions = 2;
  spec.classes = 3;
  spec.rare_fraction = 0.0;
  spec.base_cell_count = 10;
  const Dataset ds = generate(spec);
  // All samples of a (region, class) cell collapse onto one point, and
  // distinct cells stay at least `separation` apart.
  for (int i = 1; i < ds.size(); ++i) {
    const bool same_cell = ds.attr(i, 0) == ds.attr(i - 1, 0) &&
                           ds.labels[i] == ds.labels[i - 1];
    const double gap = (ds.features.row(i) - ds.features.row(i - 1)).norm();
    if (same_cell)
      CHECK(gap == 0.0);
    else
      CHECK(gap >= spec.separation);
  }
}

TEST_CASE("degenerate specs are rejected") {
  SyntheticSpec spec;
  spec.classes = 1;
  CHECK_THROWS_AS(generate(spec), Error);
  spec = SyntheticSpec{};
  spec.base_cell_count = 0;
  CHECK_THROWS_AS(generate(spec), Error);
  spec = SyntheticSpec{};
  spec.rare_scale = 1.0;
  CHECK_THROWS_AS(generate(spec), Error);
  spec = SyntheticSpec{};
  spec.dim = 1;
  CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("csv round-trip preserves features exactly") {
  TempDir tmp;
  SyntheticSpec spec;
  spec.regions = 2;
  spec.classes = 3;
  spec.base_cell_count = 15;
  spec.rare_fraction = 0.3;
  spec.rare_scale = 0.4;
  spec.dim = 5;
  const Dataset original = generate(spec);
  const std::string path = tmp.file("round.csv");
  write_csv(original, path);
  const Dataset loaded = load_csv(path, schema_for(original));

  REQUIRE(loaded.size() == original.size());
  CHECK((loaded.features.array() == original.features.array()).all());
  CHECK((loaded.labels.array() == original.labels.array()).all());
  CHECK(loaded.attr_columns == original.attr_columns);

  // Labels stay dense 0..K-1.
  const auto counts = loaded.class_counts();
  for (const int c : counts) CHECK(c > 0);

  SUBCASE("written bytes are reproducible") {
    const std::string again = tmp.file("round2.csv");
    write_csv(generate(spec), again);
    CHECK(read_text_file(path) == read_text_file(again));
  }
}

TEST_CASE("label mapping follows first appearance") {
  TempDir tmp;
  const std::string path = tmp.file("labels.csv");
  write_text_file(path,
                  "f0,label,region\n"
                  "0.5,cat,A\n"
                  "1.5,dog,A\n"
                  "2.5,cat,B\n"
                  "3.5,bird,B\n");
  CsvSchema schema;
  schema.feature_columns = {"f0"};
  schema.label_column = "label";
  schema.attribute_columns = {"region"};
  const Dataset ds = load_csv(path, schema);
  REQUIRE(ds.size() == 4);
  CHECK(ds.labels[0] == 0);  // cat
  CHECK(ds.labels[1] == 1);  // dog
  CHECK(ds.labels[2] == 0);  // cat again
  CHECK(ds.labels[3] == 2);  // bird
  CHECK(ds.num_classes() == 3);
}

TEST_CASE("ingestion errors carry the row and column") {
  TempDir tmp;
  CsvSchema schema;
  schema.feature_columns = {"f0"};
  schema.label_column = "label";

  SUBCASE("empty file") {
    const std::string path = tmp.file("empty.csv");
    write_text_file(path, "");
    CHECK_THROWS_AS(load_csv(path, schema), Error);
  }
  SUBCASE("header only") {
    const std::string path = tmp.file("header.csv");
    write_text_file(path, "f0,label\n");
    CHECK_THROWS_WITH_AS(load_csv(path, schema), doctest::Contains("no data rows"),
                         Error);
  }
  SUBCASE("missing column") {
    const std::string path = tmp.file("missing.csv");
    write_text_file(path, "f0,klass\n1.0,x\n");
    CHECK_THROWS_WITH_AS(load_csv(path, schema), doctest::Contains("label"), Error);
  }
  SUBCASE("unparseable number names the row") {
    const std::string path = tmp.file("bad.csv");
    write_text_file(path, "f0,label\n1.0,x\noops,y\n");
    CHECK_THROWS_WITH_AS(load_csv(path, schema), doctest::Contains("row 3"), Error);
  }
  SUBCASE("non-finite value is rejected") {
    const std::string path = tmp.file("inf.csv");
    write_text_file(path, "f0,label\ninf,x\n");
    CHECK_THROWS_WITH_AS(load_csv(path, schema), doctest::Contains("non-finite"), Error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_csv(tmp.file("nope.csv"), schema), Error);
  }
}

TEST_CASE("numeric columns can be binned into a grid attribute") {
  TempDir tmp;
  const std::string path = tmp.file("grid.csv");
  write_text_file(path,
                  "f0,label,lat,lon\n"
                  "0.1,a,0.0,0.0\n"
                  "0.2,a,1.0,0.0\n"
                  "0.3,b,0.0,1.0\n"
                  "0.4,b,1.0,1.0\n"
                  "0.5,b,0.49,0.51\n");
  CsvSchema schema;
  schema.feature_columns = {"f0"};
  schema.label_column = "label";
  schema.grid = GridSpec{"lat", "lon", 2, "cell"};
  const Dataset ds = load_csv(path, schema);
  const int cell = ds.attr_index("cell");
  REQUIRE(cell >= 0);
  CHECK(ds.attr(0, cell) == "g0_0");
  CHECK(ds.attr(1, cell) == "g1_0");
  CHECK(ds.attr(2, cell) == "g0_1");
  CHECK(ds.attr(3, cell) == "g1_1");
  CHECK(ds.attr(4, cell) == "g0_1");  // 0.49 stays low, 0.51 crosses the midline
}

}  // TEST_SUITE
