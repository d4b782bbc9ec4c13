// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_SEARCH_H_
#define SUFFX_SEARCH_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "suffx/circuit.h"
#include "suffx/ensemble.h"
#include "suffx/guarantees.h"
#include "suffx/instance.h"

namespace suffx {

// Candidates tie on expected prediction within this tolerance; the marginal
// probability then decides, then the lexicographically smaller subset.
inline constexpr double kEpTieTolerance = 1e-9;

// One explanation candidate: a subset of the explained instance together
// with its sufficiency metrics. SDP fields are filled on demand (sampling is
// much more expensive than the search itself).
struct Explanation {
  PartialInstance subset;
  double ep_logodds = 0.0;   // raw EP_O(z), not sign-normalized
  double approx_ep = 0.0;    // sigmoid(EP_O)
  double marginal = 0.0;     // Pr(z)
  int size = 0;

  std::optional<SdpEstimate> sdp_estimate;
  std::optional<SdpBound> bound_logodds;
  std::optional<SdpBound> bound_approx;

  Explanation() : subset(1) {}
  explicit Explanation(PartialInstance z) : subset(std::move(z)) {}
};

// Evaluation counters for the search complexity contract: at most n*k*b
// expected-prediction evaluations and as many marginal evaluations per run
// (the marginal is obtained as the denominator of the same evaluation).
struct BeamStats {
  std::size_t ep_evaluations = 0;
  std::size_t marginal_evaluations = 0;
};

struct BeamResult {
  // Best explanation of each size 1..k; per_level[i] has size i + 1.
  std::vector<Explanation> per_level;
  // Overall tracked optimum, including the empty explanation. Updated on a
  // strictly higher score, or an equal score (within tolerance) with a
  // higher marginal, which also enforces subset-minimality.
  Explanation mlse;
  // Tracked MLSE score after every level 0..k; non-decreasing.
  std::vector<double> mlse_score_trace;
  // Cumulative wall time at the end of each level 1..k. Diagnostic only;
  // keep out of any output that must be reproducible.
  std::vector<double> level_cumulative_millis;
  BeamStats stats;
  int predicted_class = 1;
};

// Level-wise beam search for the most likely sufficient explanation.
// Level 0 holds the empty candidate; each level extends the beam's subsets
// by one unselected feature (duplicates merged, zero-marginal candidates
// discarded), ranks by expected prediction with ties broken by marginal
// probability, and keeps the top b. Negative-class instances are handled by
// ranking on the negated expected log-odds. Deterministic for fixed inputs
// regardless of thread count.
BeamResult beam_search_mlse(const Circuit& circuit, const Ensemble& ensemble,
                            const PartialInstance& x, int k, int beam_width,
                            int threads = 1);

// Ground-truth search over all subsets of size <= k with the same ranking
// and tracking semantics. Budget-limited (n <= 14).
Explanation exhaustive_mlse(const Circuit& circuit, const Ensemble& ensemble,
                            const PartialInstance& x, int k);

enum class LogicalMode {
  // Every positive-probability completion keeps the decision (SDP = 1).
  kDistributionAware,
  // Every completion in {0,1}^|M| keeps the decision (classical sufficient
  // reason).
  kWorstCase,
};

struct LogicalResult {
  int size = 0;
  // All minimum-cardinality witnesses, as sorted feature index lists in
  // lexicographic order.
  std::vector<std::vector<int>> witnesses;
};

// Brute-force minimum-cardinality logical explanations. Budget-limited
// (n <= 14).
LogicalResult logical_explanations_bruteforce(const Circuit& circuit,
                                              const Ensemble& ensemble,
                                              const PartialInstance& x,
                                              LogicalMode mode);

// Smallest explanation whose (sign-normalized) expected log-odds reaches
// ep_min, maximizing Pr(z) among qualifying candidates of that size. Runs
// the beam level by level up to size n and stops at the first qualifying
// level. Throws Unreachable (carrying the best score attained) if even the
// full instance does not qualify.
Explanation ep_threshold_search(const Circuit& circuit,
                                const Ensemble& ensemble,
                                const PartialInstance& x, double ep_min,
                                int beam_width, int threads = 1);

}  // namespace suffx

#endif  // SUFFX_SEARCH_H_
