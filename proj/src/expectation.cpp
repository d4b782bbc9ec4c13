// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/expectation.h"

#include <cmath>
#include <vector>

#include "suffx/errors.h"

namespace suffx {

double sigmoid(double log_odds) {
  if (log_odds >= 0.0) {
    return 1.0 / (1.0 + std::exp(-log_odds));
  }
  const double e = std::exp(log_odds);
  return e / (1.0 + e);
}

namespace {

// marginal(path ∪ z) with scratch reuse: literals are applied to the scratch
// copy of z and undone afterwards. Only called for consistent paths.
double path_marginal(const Circuit& circuit, const PathConjunction& path,
                     PartialInstance& scratch, MarginalCache* cache) {
  std::vector<int> applied;
  applied.reserve(path.literals.size());
  for (const auto& [feature, value] : path.literals) {
    if (!scratch.has(feature)) {
      scratch.set(feature, value);
      applied.push_back(feature);
    }
  }
  double result;
  if (cache != nullptr) {
    const std::string key = scratch.canonical_key();
    if (auto hit = cache->get(key)) {
      result = *hit;
    } else {
      result = circuit.marginal(scratch);
      cache->put(key, result);
    }
  } else {
    result = circuit.marginal(scratch);
  }
  for (const int feature : applied) scratch.unset(feature);
  return result;
}

}  // namespace

ExpectationResult expected_logodds(const Circuit& circuit,
                                   const Ensemble& ensemble,
                                   const PartialInstance& z,
                                   MarginalCache* cache) {
  if (circuit.num_features() != ensemble.num_features()) {
    throw DimensionMismatch("circuit has " +
                            std::to_string(circuit.num_features()) +
                            " features, ensemble has " +
                            std::to_string(ensemble.num_features()));
  }
  const double pz = circuit.marginal(z);
  if (pz == 0.0) throw ZeroEvidence("expected_logodds: Pr(z) = 0");

  ExpectationResult result;
  result.evidence_marginal = pz;
  result.per_tree_contributions.reserve(ensemble.tree_count());
  PartialInstance scratch = z;
  double total = ensemble.base_score();
  for (const auto& paths : ensemble.leaf_paths()) {
    double contribution = 0.0;
    for (const PathConjunction& path : paths) {
      if (!path.consistent_with(z)) continue;
      contribution +=
          path.leaf_weight * path_marginal(circuit, path, scratch, cache);
    }
    contribution /= pz;
    result.per_tree_contributions.push_back(contribution);
    total += contribution;
  }
  result.expected_logodds = total;
  result.approx_expected_prediction = sigmoid(total);
  return result;
}

double exact_expected_prediction_smallcase(const Circuit& circuit,
                                           const Ensemble& ensemble,
                                           const PartialInstance& z,
                                           int max_free_vars) {
  if (circuit.num_features() != ensemble.num_features()) {
    throw DimensionMismatch("circuit/ensemble feature count mismatch");
  }
  std::vector<int> free_vars;
  for (int i = 0; i < z.num_features(); ++i) {
    if (!z.has(i)) free_vars.push_back(i);
  }
  if (static_cast<int>(free_vars.size()) > max_free_vars) {
    throw BudgetExceeded("exact expected prediction over " +
                         std::to_string(free_vars.size()) +
                         " free variables exceeds budget of " +
                         std::to_string(max_free_vars));
  }
  const double pz = circuit.marginal(z);
  if (pz == 0.0) throw ZeroEvidence("exact expected prediction: Pr(z) = 0");

  PartialInstance full = z;
  const std::uint64_t completions = 1ULL << free_vars.size();
  double acc = 0.0;
  for (std::uint64_t mask = 0; mask < completions; ++mask) {
    for (std::size_t j = 0; j < free_vars.size(); ++j) {
      full.unset(free_vars[j]);
      full.set(free_vars[j], (mask >> j) & 1);
    }
    const double p = circuit.marginal(full);
    if (p == 0.0) continue;
    acc += p * sigmoid(ensemble.log_odds(full));
  }
  return acc / pz;
}

}  // namespace suffx
