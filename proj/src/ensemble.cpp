// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/ensemble.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string>

#include <json.hpp>

#include "suffx/errors.h"

namespace suffx {

namespace {

std::string tree_tag(std::size_t t, int id) {
  return "tree " + std::to_string(t) + " node " + std::to_string(id);
}

// Depth-first path collection; doubles as structural validation (ids in
// range, no node reachable twice, no feature tested twice on a path).
void collect_paths(const Tree& tree, std::size_t t, int num_features,
                   std::vector<PathConjunction>& out) {
  const int count = static_cast<int>(tree.nodes.size());
  if (tree.root < 0 || tree.root >= count) {
    throw InvariantViolation("tree " + std::to_string(t) +
                             ": root id out of range");
  }
  std::vector<char> visited(tree.nodes.size(), 0);
  std::vector<std::pair<int, bool>> path;

  struct Frame {
    int id;
    int stage;  // 0: enter, 1: after false child, 2: after true child
  };
  std::vector<Frame> stack;
  stack.push_back({tree.root, 0});
  while (!stack.empty()) {
    Frame& frame = stack.back();
    const int id = frame.id;
    if (frame.stage == 0) {
      if (id < 0 || id >= count) {
        throw InvariantViolation("tree " + std::to_string(t) +
                                 ": child id out of range");
      }
      if (visited[id]) {
        throw InvariantViolation(tree_tag(t, id) +
                                 ": node reachable via two paths (not a tree)");
      }
      visited[id] = 1;
      const TreeNode& node = tree.nodes[id];
      if (node.is_leaf()) {
        PathConjunction conj;
        conj.literals = path;
        std::sort(conj.literals.begin(), conj.literals.end());
        conj.leaf_weight = node.leaf_weight;
        out.push_back(std::move(conj));
        stack.pop_back();
        continue;
      }
      if (node.feature >= num_features) {
        throw InvariantViolation(tree_tag(t, id) + ": feature index " +
                                 std::to_string(node.feature) +
                                 " out of range");
      }
      for (const auto& [feature, value] : path) {
        if (feature == node.feature) {
          throw InvariantViolation(tree_tag(t, id) + ": feature " +
                                   std::to_string(node.feature) +
                                   " tested twice on one path");
        }
      }
      frame.stage = 1;
      path.emplace_back(node.feature, false);
      stack.push_back({node.false_child, 0});
    } else if (frame.stage == 1) {
      frame.stage = 2;
      path.back().second = true;
      stack.push_back({tree.nodes[id].true_child, 0});
    } else {
      path.pop_back();
      stack.pop_back();
    }
  }
}

}  // namespace

Ensemble::Ensemble(std::vector<Tree> trees, double base_score,
                   double threshold, int num_features)
    : trees_(std::move(trees)),
      base_score_(base_score),
      threshold_(threshold),
      num_features_(num_features) {
  if (num_features_ <= 0) {
    throw InvariantViolation("ensemble must have at least one feature");
  }
  if (!std::isfinite(base_score_) || !std::isfinite(threshold_)) {
    throw InvariantViolation("base_score and threshold must be finite");
  }
  paths_.resize(trees_.size());
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    if (trees_[t].nodes.empty()) {
      throw InvariantViolation("tree " + std::to_string(t) + " has no nodes");
    }
    collect_paths(trees_[t], t, num_features_, paths_[t]);
  }
}

std::size_t Ensemble::leaf_count() const {
  std::size_t total = 0;
  for (const auto& paths : paths_) total += paths.size();
  return total;
}

double Ensemble::log_odds(const PartialInstance& x) const {
  if (x.num_features() != num_features_) {
    throw DimensionMismatch("instance feature count mismatch");
  }
  if (!x.full()) {
    throw IncompleteInstance("log_odds requires a full instance");
  }
  double total = base_score_;
  for (const Tree& tree : trees_) {
    int id = tree.root;
    while (!tree.nodes[id].is_leaf()) {
      const TreeNode& node = tree.nodes[id];
      id = x.value(node.feature) ? node.true_child : node.false_child;
    }
    total += tree.nodes[id].leaf_weight;
  }
  return total;
}

int Ensemble::classify(const PartialInstance& x) const {
  return log_odds(x) >= threshold_ ? 1 : 0;
}

double Ensemble::upper_bound_log_odds(const PartialInstance& z) const {
  if (z.num_features() != num_features_) {
    throw DimensionMismatch("evidence feature count mismatch");
  }
  double total = base_score_;
  for (const auto& paths : paths_) {
    double best = -std::numeric_limits<double>::infinity();
    for (const PathConjunction& path : paths) {
      if (path.leaf_weight > best && path.consistent_with(z)) {
        best = path.leaf_weight;
      }
    }
    if (!std::isfinite(best)) {
      throw NoConsistentLeaf("no leaf consistent with evidence");
    }
    total += best;
  }
  return total;
}

double Ensemble::lower_bound_log_odds(const PartialInstance& z) const {
  if (z.num_features() != num_features_) {
    throw DimensionMismatch("evidence feature count mismatch");
  }
  double total = base_score_;
  for (const auto& paths : paths_) {
    double best = std::numeric_limits<double>::infinity();
    for (const PathConjunction& path : paths) {
      if (path.leaf_weight < best && path.consistent_with(z)) {
        best = path.leaf_weight;
      }
    }
    if (!std::isfinite(best)) {
      throw NoConsistentLeaf("no leaf consistent with evidence");
    }
    total += best;
  }
  return total;
}

namespace {

using nlohmann::json;

Tree parse_tree(const json& entry, std::size_t t) {
  Tree tree;
  if (!entry.contains("nodes") || !entry.at("nodes").is_array()) {
    throw ParseError("tree " + std::to_string(t) + ": missing nodes array");
  }
  tree.root = entry.value("root", 0);
  int expected_id = 0;
  for (const json& node_entry : entry.at("nodes")) {
    const int id = node_entry.at("id").get<int>();
    if (id != expected_id) {
      throw ParseError(tree_tag(t, id) + ": ids must be dense and in order");
    }
    ++expected_id;
    TreeNode node;
    if (node_entry.contains("leaf_weight")) {
      node.leaf_weight = node_entry.at("leaf_weight").get<double>();
    } else {
      node.feature = node_entry.at("feature").get<int>();
      node.false_child = node_entry.at("false_child").get<int>();
      node.true_child = node_entry.at("true_child").get<int>();
      if (node.feature < 0) {
        throw ParseError(tree_tag(t, id) + ": negative feature index");
      }
    }
    tree.nodes.push_back(node);
  }
  return tree;
}

}  // namespace

Ensemble load_ensemble(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("ensemble: invalid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("trees")) {
      throw ParseError("ensemble: expected object with n and trees");
    }
    const int n = doc.at("n").get<int>();
    const double base_score = doc.value("base_score", 0.0);
    const double threshold = doc.value("threshold", 0.0);
    std::vector<Tree> trees;
    for (const json& entry : doc.at("trees")) {
      trees.push_back(parse_tree(entry, trees.size()));
    }
    return Ensemble(std::move(trees), base_score, threshold, n);
  } catch (const json::exception& e) {
    throw ParseError(std::string("ensemble: ") + e.what());
  }
}

Ensemble load_ensemble_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ensemble file: " + path);
  return load_ensemble(in);
}

}  // namespace suffx
