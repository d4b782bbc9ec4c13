// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_EXPECTATION_H_
#define SUFFX_EXPECTATION_H_

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "suffx/circuit.h"
#include "suffx/ensemble.h"
#include "suffx/instance.h"

namespace suffx {

// Numerically stable sigmoid.
double sigmoid(double log_odds);

struct ExpectationResult {
  // E[O(zM) | z], computed exactly by linearity over per-leaf conditionals.
  double expected_logodds = 0.0;
  // sigmoid(expected_logodds): a first-order approximation of the exact
  // expected prediction E[f(zM) | z], not a bound.
  double approx_expected_prediction = 0.0;
  // Pr(z).
  double evidence_marginal = 0.0;
  // Conditional expectation of each tree's leaf weight; expected_logodds =
  // base_score + sum of these.
  std::vector<double> per_tree_contributions;
};

// Memo for marginal(path ∪ z) lookups, keyed by the canonical evidence
// encoding. Values are deterministic, so sharing across workers would be
// benign; users of the search keep one per worker instead.
class MarginalCache {
 public:
  std::optional<double> get(const std::string& key) const {
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void put(const std::string& key, double value) { map_[key] = value; }
  std::size_t size() const { return map_.size(); }
  void clear() { map_.clear(); }

 private:
  std::unordered_map<std::string, double> map_;
};

// Expected log-odds of the ensemble under Pr(M | z):
//   base_score + sum over trees and leaves of weight_l * Pr(path_l | z)
// where Pr(path_l | z) is 0 for paths contradicting z (no circuit call) and
// marginal(path_l ∪ z) / marginal(z) otherwise. One circuit marginal per
// consistent (leaf, z) pair.
// Throws ZeroEvidence when Pr(z) = 0 and DimensionMismatch when circuit and
// ensemble disagree on n.
ExpectationResult expected_logodds(const Circuit& circuit,
                                   const Ensemble& ensemble,
                                   const PartialInstance& z,
                                   MarginalCache* cache = nullptr);

// Exact expected prediction E[f(zM) | z] = sum_m Pr(m|z) sigmoid(O(zm)) by
// completion enumeration. Test/oracle use only; the production path is
// expected_logodds + sigmoid. Throws BudgetExceeded when more than
// max_free_vars features are unassigned.
double exact_expected_prediction_smallcase(const Circuit& circuit,
                                           const Ensemble& ensemble,
                                           const PartialInstance& z,
                                           int max_free_vars = 20);

}  // namespace suffx

#endif  // SUFFX_EXPECTATION_H_
