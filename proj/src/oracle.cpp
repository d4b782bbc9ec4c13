// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/oracle.h"

#include <cmath>
#include <string>
#include <vector>

#include "suffx/errors.h"
#include "suffx/expectation.h"

namespace suffx::oracle {

namespace {

double eval_node(const Circuit& circuit, const PartialInstance& full, int id,
                 std::vector<double>& memo, std::vector<char>& computed) {
  if (computed[id]) return memo[id];
  const CircuitNode& node = circuit.node(id);
  double value = 0.0;
  switch (node.kind) {
    case NodeKind::kLiteral:
      value = full.value(node.var) == node.polarity ? 1.0 : 0.0;
      break;
    case NodeKind::kSum:
      for (std::size_t j = 0; j < node.children.size(); ++j) {
        value += node.weights[j] *
                 eval_node(circuit, full, node.children[j], memo, computed);
      }
      break;
    case NodeKind::kProduct:
      value = 1.0;
      for (const int child : node.children) {
        value *= eval_node(circuit, full, child, memo, computed);
      }
      break;
  }
  memo[id] = value;
  computed[id] = 1;
  return value;
}

double walk_tree(const Tree& tree, int id, const PartialInstance& full) {
  const TreeNode& node = tree.nodes[id];
  if (node.is_leaf()) return node.leaf_weight;
  return walk_tree(
      tree, full.value(node.feature) ? node.true_child : node.false_child,
      full);
}

std::vector<int> free_variables(const PartialInstance& z) {
  std::vector<int> out;
  for (int i = 0; i < z.num_features(); ++i) {
    if (!z.has(i)) out.push_back(i);
  }
  return out;
}

void check_free_budget(std::size_t free_count, const EnumerationBudget& b) {
  if (static_cast<int>(free_count) > b.max_free_vars ||
      (free_count < 63 &&
       static_cast<long>(1L << free_count) > b.max_subsets)) {
    throw BudgetExceeded("enumeration over " + std::to_string(free_count) +
                         " free variables exceeds the oracle budget");
  }
}

}  // namespace

double stable_sum(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::vector<double> level = values;
  while (level.size() > 1) {
    std::vector<double> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      next.push_back(level[i] + level[i + 1]);
    }
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

double likelihood(const Circuit& circuit, const PartialInstance& full) {
  if (!full.full()) {
    throw IncompleteInstance("oracle likelihood requires a full assignment");
  }
  std::vector<double> memo(circuit.node_count(), 0.0);
  std::vector<char> computed(circuit.node_count(), 0);
  return eval_node(circuit, full, circuit.root(), memo, computed);
}

double log_odds(const Ensemble& ensemble, const PartialInstance& full) {
  if (!full.full()) {
    throw IncompleteInstance("oracle log_odds requires a full assignment");
  }
  double total = ensemble.base_score();
  for (std::size_t t = 0; t < ensemble.tree_count(); ++t) {
    total += walk_tree(ensemble.tree(t), ensemble.tree(t).root, full);
  }
  return total;
}

std::vector<double> joint_table(const Circuit& circuit) {
  const int n = circuit.num_features();
  if (n > 16) {
    throw BudgetExceeded("joint table over n = " + std::to_string(n) +
                         " exceeds the n <= 16 budget");
  }
  const std::uint64_t size = 1ULL << n;
  std::vector<double> table(size);
  PartialInstance full(n);
  for (int i = 0; i < n; ++i) full.set(i, false);
  for (std::uint64_t index = 0; index < size; ++index) {
    for (int i = 0; i < n; ++i) {
      full.unset(i);
      full.set(i, (index >> i) & 1);
    }
    table[index] = likelihood(circuit, full);
  }
  const double total = stable_sum(table);
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvariantViolation("joint table sums to " + std::to_string(total) +
                             ", expected 1");
  }
  return table;
}

double table_marginal(const std::vector<double>& table,
                      const PartialInstance& evidence) {
  std::vector<double> consistent;
  for (std::uint64_t index = 0; index < table.size(); ++index) {
    bool ok = true;
    for (int i = 0; i < evidence.num_features(); ++i) {
      const std::int8_t a = evidence.raw(i);
      if (a >= 0 && static_cast<std::int8_t>((index >> i) & 1) != a) {
        ok = false;
        break;
      }
    }
    if (ok) consistent.push_back(table[index]);
  }
  return stable_sum(consistent);
}

std::pair<double, double> ep_by_enumeration(const Circuit& circuit,
                                            const Ensemble& ensemble,
                                            const PartialInstance& z,
                                            EnumerationBudget budget) {
  if (circuit.num_features() != ensemble.num_features()) {
    throw DimensionMismatch("circuit/ensemble feature count mismatch");
  }
  const std::vector<int> free_vars = free_variables(z);
  check_free_budget(free_vars.size(), budget);

  const std::uint64_t completions = 1ULL << free_vars.size();
  std::vector<double> weights(completions);
  std::vector<double> weighted_logodds(completions);
  std::vector<double> weighted_predictions(completions);
  PartialInstance full = z;
  for (std::uint64_t mask = 0; mask < completions; ++mask) {
    for (std::size_t j = 0; j < free_vars.size(); ++j) {
      full.unset(free_vars[j]);
      full.set(free_vars[j], (mask >> j) & 1);
    }
    const double p = likelihood(circuit, full);
    weights[mask] = p;
    if (p == 0.0) continue;
    const double o = log_odds(ensemble, full);
    weighted_logodds[mask] = p * o;
    weighted_predictions[mask] = p * sigmoid(o);
  }
  const double total = stable_sum(weights);
  if (total == 0.0) throw ZeroEvidence("enumeration: Pr(z) = 0");
  return {stable_sum(weighted_logodds) / total,
          stable_sum(weighted_predictions) / total};
}

double sdp_by_enumeration(const Circuit& circuit, const Ensemble& ensemble,
                          const PartialInstance& x, const PartialInstance& z,
                          EnumerationBudget budget) {
  if (!x.full()) throw IncompleteInstance("sdp oracle requires a full x");
  if (!z.subset_of(x)) {
    throw SubsetViolation("explanation must be a subset of the instance");
  }
  const std::vector<int> free_vars = free_variables(z);
  check_free_budget(free_vars.size(), budget);
  const double threshold = ensemble.threshold();
  const int wanted = log_odds(ensemble, x) >= threshold ? 1 : 0;

  const std::uint64_t completions = 1ULL << free_vars.size();
  std::vector<double> weights(completions);
  std::vector<double> matching(completions);
  PartialInstance full = z;
  for (std::uint64_t mask = 0; mask < completions; ++mask) {
    for (std::size_t j = 0; j < free_vars.size(); ++j) {
      full.unset(free_vars[j]);
      full.set(free_vars[j], (mask >> j) & 1);
    }
    const double p = likelihood(circuit, full);
    weights[mask] = p;
    if (p == 0.0) continue;
    const int decision = log_odds(ensemble, full) >= threshold ? 1 : 0;
    if (decision == wanted) matching[mask] = p;
  }
  const double total = stable_sum(weights);
  if (total == 0.0) throw ZeroEvidence("enumeration: Pr(z) = 0");
  return stable_sum(matching) / total;
}

}  // namespace suffx::oracle
