#include <cmath>

#include "doctest.h"
#include "osag/coverage.hpp"
#include "osag/risk.hpp"
#include "osag/rng.hpp"
#include "osag/sampling.hpp"

using namespace osag;

namespace {

ContractSet two_contracts(int n0, int n1, double w0, double w1) {
  ContractSet set;
  int row = 0;
  for (const auto& [n, w] : {std::pair{n0, w0}, std::pair{n1, w1}}) {
    Contract c;
    c.key = {"k" + std::to_string(set.size()), kRareFalsePart};
    c.priority = 1;
    c.target_share = w;
    for (int i = 0; i < n; ++i, ++row) {
      c.members.push_back(row);
      set.sample_to_contract.push_back(set.size());
    }
    set.contracts.push_back(std::move(c));
  }
  set.base_priority = set.rare_priority = 1;
  set.shares_computed = true;
  return set;
}

Eigen::VectorXd simplex_point(int m, SeededStream& stream) {
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) v[i] = -std::log1p(-stream.next_unit());
  return v / v.sum();
}

}  // namespace

TEST_SUITE("risk") {

TEST_CASE("contract losses average members then clip") {
  const auto set = two_contracts(2, 2, 0.5, 0.5);
  Eigen::VectorXd per_sample(4);
  per_sample << 0.2, 0.4, 5.0, 15.0;
  const auto lv = contract_losses(per_sample, set, 10.0);
  CHECK(lv.losses[0] == doctest::Approx(0.3));
  CHECK(lv.losses[1] == doctest::Approx(10.0));  // mean 10 stays at the ceiling

  SUBCASE("all-zero losses give the zero vector") {
    const auto zero = contract_losses(Eigen::VectorXd::Zero(4), set, 10.0);
    CHECK(zero.losses.isZero());
  }
  SUBCASE("length mismatch is a shape error") {
    CHECK_THROWS_AS(contract_losses(Eigen::VectorXd::Zero(3), set, 10.0), Error);
  }
  SUBCASE("non-positive bound is rejected") {
    CHECK_THROWS_AS(contract_losses(per_sample, set, 0.0), Error);
  }
}

TEST_CASE("service risk is the q-weighted loss") {
  ContractLossVector lv;
  lv.bound = 1.0;
  lv.losses.resize(2);
  lv.losses << 0.2, 0.8;

  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(service_risk(lv, uniform) == doctest::Approx(0.5));

  Eigen::VectorXd point(2);
  point << 0.0, 1.0;
  CHECK(service_risk(lv, point) == doctest::Approx(0.8));

  Eigen::VectorXd bad(3);
  bad << 0.3, 0.3, 0.4;
  CHECK_THROWS_AS(service_risk(lv, bad), Error);
}

TEST_CASE("risk under the target shares matches the per-sample brute force") {
  const auto set = two_contracts(3, 5, 0.4, 0.6);
  Eigen::VectorXd per_sample(8);
  per_sample << 0.1, 0.2, 0.3, 1.0, 2.0, 3.0, 4.0, 5.0;
  const auto lv = contract_losses(per_sample, set, 10.0);
  const double risk = service_risk(lv, set.target_shares());

  // Brute force: sum over samples weighted w_c/n_c.
  const Eigen::VectorXd weights = per_sample_weights(set);
  const double brute = weights.dot(per_sample);
  CHECK(risk == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("deviation bound report") {
  ContractLossVector lv;
  lv.bound = 1.0;
  lv.losses.resize(2);
  lv.losses << 0.2, 0.8;
  Eigen::VectorXd q(2), qt(2);
  q << 1.0, 0.0;
  qt << 0.0, 1.0;

  SUBCASE("identical distributions give 0 <= 0") {
    const auto r = risk_deviation_bound_check(lv, q, q);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
    CHECK(r.holds);
  }
  SUBCASE("hand case: lhs 0.6, rhs 2") {
    const auto r = risk_deviation_bound_check(lv, q, qt);
    CHECK(r.lhs == doctest::Approx(0.6));
    CHECK(r.rhs == doctest::Approx(2.0));
    CHECK(r.holds);
  }
}

TEST_CASE("bound never violated on randomized triples") {
  SeededStream stream(4242);
  int checked = 0;
  for (int t = 0; t < 100000; ++t) {
    const int m = 2 + static_cast<int>(stream.uniform_below(31));
    const double bound = 0.5 + 19.5 * stream.next_unit();
    ContractLossVector lv;
    lv.bound = bound;
    lv.losses.resize(m);
    for (int i = 0; i < m; ++i) lv.losses[i] = bound * stream.next_unit();
    const Eigen::VectorXd q = simplex_point(m, stream);
    const Eigen::VectorXd qt = simplex_point(m, stream);
    const auto r = risk_deviation_bound_check(lv, q, qt);
    REQUIRE(r.holds);
    ++checked;
  }
  CHECK(checked == 100000);
}

TEST_CASE("two-point witness reaches exactly half the bound") {
  // losses {0,B} with opposing point masses: lhs = B, rhs = 2B.
  const double bound = 10.0;
  ContractLossVector lv;
  lv.bound = bound;
  lv.losses.resize(2);
  lv.losses << 0.0, bound;
  Eigen::VectorXd q(2), qt(2);
  q << 1.0, 0.0;
  qt << 0.0, 1.0;
  const auto r = risk_deviation_bound_check(lv, q, qt);
  CHECK(r.lhs == bound);
  CHECK(r.rhs == 2.0 * bound);
  CHECK(r.lhs == r.rhs / 2.0);
}

TEST_CASE("service risk is linear in q") {
  SeededStream stream(515);
  for (int rep = 0; rep < 500; ++rep) {
    const int m = 2 + static_cast<int>(stream.uniform_below(10));
    ContractLossVector lv;
    lv.bound = 5.0;
    lv.losses.resize(m);
    for (int i = 0; i < m; ++i) lv.losses[i] = 5.0 * stream.next_unit();
    const Eigen::VectorXd q = simplex_point(m, stream);
    const Eigen::VectorXd qt = simplex_point(m, stream);
    const double lambda = stream.next_unit();
    const Eigen::VectorXd mix = lambda * q + (1.0 - lambda) * qt;
    const double lhs = service_risk(lv, mix);
    const double rhs =
        lambda * service_risk(lv, q) + (1.0 - lambda) * service_risk(lv, qt);
    REQUIRE(std::abs(lhs - rhs) <= 1e-12);
  }
}

}  // TEST_SUITE
