// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_CIRCUIT_H_
#define SUFFX_CIRCUIT_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "suffx/instance.h"
#include "suffx/rng.h"

namespace suffx {

enum class NodeKind { kLiteral, kSum, kProduct };

struct CircuitNode {
  NodeKind kind = NodeKind::kLiteral;
  // Literal payload.
  int var = -1;
  bool polarity = false;
  // Sum/product payload. Sum weights are renormalized at load.
  std::vector<int> children;
  std::vector<double> weights;
};

// A smooth, decomposable probabilistic circuit over n binary variables.
//
// Nodes are stored in topological order (every child index precedes its
// parent) and node ids equal positions in the list. Construction checks all
// structural invariants eagerly: child ordering, smoothness of sum nodes,
// decomposability of product nodes, strictly positive sum weights
// normalizing to 1 within 1e-9 (then renormalized exactly), variable indices
// in range, and full root scope. Immutable afterwards; all queries are
// const and safe to call from many threads.
class Circuit {
 public:
  Circuit(std::vector<CircuitNode> nodes, int root, int num_features);

  int num_features() const { return num_features_; }
  int root() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }
  const CircuitNode& node(int id) const { return nodes_[id]; }

  // Pr(e). Single bottom-up pass in linear space; if any intermediate value
  // underflows (drops into (0, 1e-300), or a product of positive factors
  // rounds to zero) the query is re-evaluated in log space. Empty evidence
  // yields 1.
  double marginal(const PartialInstance& evidence) const;

  // log Pr(e); -inf when the evidence has probability zero. Always runs the
  // log-sum-exp pass.
  double log_marginal(const PartialInstance& evidence) const;

  // Pr(query | given) = Pr(query ∪ given) / Pr(given).
  // Throws ZeroEvidence when Pr(given) = 0, InconsistentEvidence when the
  // two assignments conflict.
  double conditional(const PartialInstance& query,
                     const PartialInstance& given) const;

  // `count` full instances distributed as Pr(· | given), deterministic in
  // (seed, count) and independent of the number of threads. See
  // ConditionalSampler for the draw schedule.
  std::vector<PartialInstance> sample_conditional(const PartialInstance& given,
                                                  long count,
                                                  std::uint64_t seed,
                                                  int threads = 1) const;

 private:
  std::vector<CircuitNode> nodes_;
  int root_;
  int num_features_;
};

// Reusable conditional sampler: one bottom-up pass with evidence at
// construction, then one top-down descent per sample. The descent is
// depth-first with product children visited left to right; every sum-node
// visit consumes exactly one uniform variate, and the chosen child j has
// probability weight_j * child_marginal_j / node_marginal.
class ConditionalSampler {
 public:
  ConditionalSampler(const Circuit& circuit, PartialInstance given);

  double evidence_log_marginal() const { return evidence_log_marginal_; }

  // Fills out with a full instance extending the evidence.
  void sample_into(Rng& rng, PartialInstance& out) const;

 private:
  const Circuit& circuit_;
  PartialInstance given_;
  std::vector<double> log_marginals_;
  double evidence_log_marginal_;
};

// Parses the circuit file format:
//   { "n": <count>, "root": <id>, "nodes": [
//       {"id":0,"kind":"lit","var":0,"value":true},
//       {"id":1,"kind":"sum","children":[...],"weights":[...]},
//       {"id":2,"kind":"prod","children":[...]} ] }
// Ids must be dense and equal to positions; children must precede parents.
Circuit load_circuit(std::istream& in);
Circuit load_circuit_file(const std::string& path);

}  // namespace suffx

#endif  // SUFFX_CIRCUIT_H_
