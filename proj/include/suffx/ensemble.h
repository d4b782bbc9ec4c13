// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_ENSEMBLE_H_
#define SUFFX_ENSEMBLE_H_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "suffx/instance.h"

namespace suffx {

// Internal node tests a binary feature: the false child handles value 0, the
// true child value 1. Leaves carry an additive log-odds contribution.
struct TreeNode {
  int feature = -1;
  int false_child = -1;
  int true_child = -1;
  double leaf_weight = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
  int root = 0;
};

// Literals collected along one root-to-leaf path, plus the leaf weight.
// Within a tree the path conjunctions are mutually exclusive and exhaustive
// over full instances.
struct PathConjunction {
  std::vector<std::pair<int, bool>> literals;  // sorted by feature index
  double leaf_weight = 0.0;

  bool consistent_with(const PartialInstance& z) const {
    for (const auto& [feature, value] : literals) {
      const std::int8_t a = z.raw(feature);
      if (a >= 0 && (a == 1) != value) return false;
    }
    return true;
  }
};

// Additive tree ensemble over binary features. The raw output is log-odds:
// base_score plus one leaf weight per tree; the probability output is the
// sigmoid, and the decision thresholds log-odds at `threshold` (default 0,
// i.e. probability 0.5). Immutable after construction; all operations are
// pure and thread-safe.
class Ensemble {
 public:
  Ensemble(std::vector<Tree> trees, double base_score, double threshold,
           int num_features);

  int num_features() const { return num_features_; }
  double base_score() const { return base_score_; }
  double threshold() const { return threshold_; }
  std::size_t tree_count() const { return trees_.size(); }
  const Tree& tree(std::size_t t) const { return trees_[t]; }

  // Root-to-leaf conjunctions, one vector per tree. Built eagerly at
  // construction (which also validates that no path tests a feature twice).
  const std::vector<std::vector<PathConjunction>>& leaf_paths() const {
    return paths_;
  }

  std::size_t leaf_count() const;

  // O(x) = base_score + sum of reached leaf weights. Requires full x.
  double log_odds(const PartialInstance& x) const;

  // 1 iff log_odds(x) >= threshold (the threshold itself classifies
  // positive).
  int classify(const PartialInstance& x) const;

  // base_score + per-tree maximum leaf weight among leaves whose path does
  // not contradict z. Upper-bounds O(zm) for every completion m; loose,
  // since maxima from different trees may rely on contradicting paths.
  double upper_bound_log_odds(const PartialInstance& z) const;

  // Mirror with per-tree minima; lower-bounds O(zm).
  double lower_bound_log_odds(const PartialInstance& z) const;

 private:
  std::vector<Tree> trees_;
  std::vector<std::vector<PathConjunction>> paths_;
  double base_score_;
  double threshold_;
  int num_features_;
};

// Parses the ensemble file format:
//   { "n": <count>, "base_score": 0.0, "threshold": 0.0, "trees": [
//       {"root": 0, "nodes": [
//          {"id":0,"feature":2,"false_child":1,"true_child":2},
//          {"id":1,"leaf_weight":-0.4}, ... ]} ] }
Ensemble load_ensemble(std::istream& in);
Ensemble load_ensemble_file(const std::string& path);

}  // namespace suffx

#endif  // SUFFX_ENSEMBLE_H_
