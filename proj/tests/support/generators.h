// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_TESTS_SUPPORT_GENERATORS_H_
#define SUFFX_TESTS_SUPPORT_GENERATORS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "suffx/circuit.h"
#include "suffx/ensemble.h"
#include "suffx/instance.h"
#include "suffx/rng.h"

namespace suffx::testing {

// Random smooth decomposable circuits built by recursive variable-range
// splits: singleton ranges become literal mixtures (or bare literals when
// point masses are allowed), larger ranges either split disjointly under a
// product node or mix two recursions under a sum node.
struct CircuitGenConfig {
  int n = 8;
  int sum_split_budget = 2;
  double sum_split_prob = 0.35;
  bool allow_point_mass = false;
  double point_mass_prob = 0.15;
};

Circuit random_circuit(std::uint64_t seed, const CircuitGenConfig& config);

// Random forest with every tree rooted at a split (never constant) unless
// max_depth is 0; features are never reused along a path. Leaf weights are
// uniform in [-leaf_scale, leaf_scale].
Ensemble random_forest(std::uint64_t seed, int n, int num_trees, int max_depth,
                       double base_score = 0.0, double threshold = 0.0,
                       double leaf_scale = 1.0);

// Same trees with all leaf weights negated (flips every decision).
Ensemble negate_leaves(const Ensemble& ensemble);

// One full instance drawn from the circuit (hence of positive probability).
PartialInstance sample_instance(const Circuit& circuit, std::uint64_t seed);

// Random evidence assigning each variable with probability `density`.
PartialInstance random_evidence(int n, std::uint64_t seed, double density);

// Subset of x keeping each assigned feature with probability keep_prob,
// then freeing random features until at least min_free are unassigned.
PartialInstance random_subset(const PartialInstance& x, std::uint64_t seed,
                              double keep_prob, int min_free = 1);

// Sorted list of features tested anywhere in the forest.
std::vector<int> used_features(const Ensemble& ensemble);

// Frees features of z (values taken from x) until some tree has at least
// two z-consistent leaves with distinct weights, so the consistent-leaf
// upper bound is strictly above the expected log-odds.
PartialInstance ensure_informative(const Circuit& circuit,
                                   const Ensemble& ensemble,
                                   const PartialInstance& x, PartialInstance z,
                                   std::uint64_t seed);

std::string circuit_to_json(const Circuit& circuit);
std::string ensemble_to_json(const Ensemble& ensemble);
std::string instances_to_csv(const std::vector<PartialInstance>& instances,
                             const std::vector<int>* labels = nullptr);

// Fresh directory under the system temp root; never reused.
std::string make_temp_dir(const std::string& hint);
std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace suffx::testing

#endif  // SUFFX_TESTS_SUPPORT_GENERATORS_H_
