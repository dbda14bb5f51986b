#include <cmath>
#include <vector>

#include "doctest.h"
#include "osag/rng.hpp"

using osag::SeededStream;

TEST_SUITE("rng") {

TEST_CASE("identical seeds give identical sequences") {
  SeededStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  SeededStream a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
  CHECK(equal < 4);
}

TEST_CASE("unit draws stay in [0,1) and look uniform") {
  SeededStream s(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("uniform_below covers the range and counts one draw") {
  SeededStream s(11);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto v = s.uniform_below(5);
    REQUIRE(v < 5);
    hits[static_cast<std::size_t>(v)] += 1;
  }
  CHECK(s.draws() == 5000);
  for (const int h : hits) CHECK(h > 800);
}

TEST_CASE("gaussian moments") {
  SeededStream s(13);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.next_gaussian();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.03);
  CHECK(s.draws() == 2 * static_cast<std::uint64_t>(n));
}

TEST_CASE("child streams are independent and reproducible") {
  const SeededStream root(99);
  SeededStream c0 = root.child(0);
  SeededStream c0_again = root.child(0);
  SeededStream c1 = root.child(1);
  CHECK(c0.next_u64() == c0_again.next_u64());
  SeededStream c0_fresh = root.child(0);
  CHECK(c0_fresh.next_u64() != c1.next_u64());
}

}  // TEST_SUITE
