// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/oracle.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "suffx/errors.h"
#include "suffx/expectation.h"
#include "support/generators.h"

using namespace suffx;

namespace {

Circuit uniform_circuit(int n) {
  std::vector<CircuitNode> nodes;
  std::vector<int> blocks;
  for (int v = 0; v < n; ++v) {
    CircuitNode t;
    t.var = v;
    t.polarity = true;
    nodes.push_back(t);
    CircuitNode f;
    f.var = v;
    f.polarity = false;
    nodes.push_back(f);
    CircuitNode s;
    s.kind = NodeKind::kSum;
    s.children = {3 * v, 3 * v + 1};
    s.weights = {0.5, 0.5};
    nodes.push_back(s);
    blocks.push_back(static_cast<int>(nodes.size()) - 1);
  }
  if (n == 1) return Circuit(std::move(nodes), blocks[0], 1);
  CircuitNode prod;
  prod.kind = NodeKind::kProduct;
  prod.children = blocks;
  nodes.push_back(prod);
  return Circuit(std::move(nodes), static_cast<int>(nodes.size()) - 1, n);
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("uniform joint table") {
  const std::vector<double> table = oracle::joint_table(uniform_circuit(2));
  REQUIRE(table.size() == 4);
  for (const double p : table) CHECK(p == doctest::Approx(0.25));
}

TEST_CASE("point-mass joint table") {
  std::vector<CircuitNode> nodes(2);
  nodes[0].var = 0;
  nodes[0].polarity = true;
  nodes[1].var = 1;
  nodes[1].polarity = false;
  CircuitNode prod;
  prod.kind = NodeKind::kProduct;
  prod.children = {0, 1};
  nodes.push_back(prod);
  const Circuit c(std::move(nodes), 2, 2);
  const std::vector<double> table = oracle::joint_table(c);
  // Mass sits on X0=1, X1=0 -> index 0b01 = 1.
  CHECK(table[1] == doctest::Approx(1.0));
  CHECK(table[0] + table[2] + table[3] == doctest::Approx(0.0));
}

TEST_CASE("table marginalization is stable under summation order") {
  testing::CircuitGenConfig config;
  config.n = 9;
  const Circuit c = testing::random_circuit(31337, config);
  const std::vector<double> table = oracle::joint_table(c);

  // Kahan-compensated total in a shuffled order as the second, independent
  // summation.
  std::vector<double> shuffled = table;
  std::mt19937 shuffle_rng(4);
  std::shuffle(shuffled.begin(), shuffled.end(), shuffle_rng);
  double total = 0.0, carry = 0.0;
  for (const double v : shuffled) {
    const double y = v - carry;
    const double t = total + y;
    carry = (t - total) - y;
    total = t;
  }
  CHECK(std::abs(total - oracle::stable_sum(table)) <= 1e-12);
  CHECK(std::abs(total - 1.0) <= 1e-9);

  for (int j = 0; j < 100; ++j) {
    const PartialInstance e = testing::random_evidence(9, 60000 + j, 0.5);
    CHECK(std::abs(c.marginal(e) - oracle::table_marginal(table, e)) <=
          1e-10);
  }
}

TEST_CASE("stable_sum is order independent") {
  std::vector<double> values;
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    values.push_back(rng.uniform_range(1e-12, 1.0));
  }
  const double a = oracle::stable_sum(values);
  std::vector<double> reversed(values.rbegin(), values.rend());
  const double b = oracle::stable_sum(reversed);
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
}

TEST_CASE("enumeration collapses on full evidence and constant forests") {
  testing::CircuitGenConfig config;
  config.n = 6;
  const Circuit c = testing::random_circuit(12, config);
  const Ensemble e = testing::random_forest(13, 6, 3, 3);
  const PartialInstance x = testing::sample_instance(c, 14);
  const auto [ep_o, ep_f] = oracle::ep_by_enumeration(c, e, x);
  CHECK(ep_o == doctest::Approx(e.log_odds(x)).epsilon(1e-12));
  CHECK(ep_f == doctest::Approx(sigmoid(e.log_odds(x))).epsilon(1e-12));

  std::vector<Tree> trees(1);
  TreeNode leaf;
  leaf.leaf_weight = 0.4;
  trees[0].nodes.push_back(leaf);
  const Ensemble constant(std::move(trees), 0.1, 0.0, 6);
  const auto [co, cf] = oracle::ep_by_enumeration(c, constant,
                                                  PartialInstance(6));
  CHECK(co == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cf == doctest::Approx(sigmoid(0.5)).epsilon(1e-12));
}

TEST_CASE("sdp enumeration basics") {
  testing::CircuitGenConfig config;
  config.n = 6;
  const Circuit c = testing::random_circuit(21, config);
  const Ensemble e = testing::random_forest(22, 6, 3, 3);
  const PartialInstance x = testing::sample_instance(c, 23);
  CHECK(oracle::sdp_by_enumeration(c, e, x, x) == doctest::Approx(1.0));

  // Decision driven entirely by observed features: condition on everything
  // the forest tests and the SDP collapses to one.
  PartialInstance z(6);
  for (const int v : testing::used_features(e)) z.set(v, x.value(v));
  CHECK(oracle::sdp_by_enumeration(c, e, x, z) == doctest::Approx(1.0));
}

TEST_CASE("oracle budgets are enforced") {
  testing::CircuitGenConfig config;
  config.n = 17;
  const Circuit c = testing::random_circuit(77, config);
  CHECK_THROWS_AS(oracle::joint_table(c), BudgetExceeded);

  testing::CircuitGenConfig big;
  big.n = 22;
  const Circuit wide = testing::random_circuit(78, big);
  const Ensemble e = testing::random_forest(79, 22, 2, 2);
  CHECK_THROWS_AS(oracle::ep_by_enumeration(wide, e, PartialInstance(22)),
                  BudgetExceeded);
}

}  // TEST_SUITE
