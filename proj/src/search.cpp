// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/search.h"

#include <algorithm>
#include <chrono>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "suffx/errors.h"
#include "suffx/expectation.h"
#include "suffx/threading.h"

namespace suffx {

namespace {

struct Candidate {
  std::vector<int> indices;  // sorted subset of feature indices
  double ep_logodds = 0.0;
  double score = 0.0;  // sign-normalized ranking score
  double marginal = 0.0;
  bool valid = false;
};

// Exact total order used for sorting and beam selection: score descending,
// marginal descending, lexicographically smaller subset first. The 1e-9 tie
// tolerance cannot be used inside a comparator (it is not transitive); it is
// applied by the tracker and the per-level selection below.
bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.marginal != b.marginal) return a.marginal > b.marginal;
  return a.indices < b.indices;
}

// Tracker implementing the MLSE update rule: replace on a strictly higher
// score (beyond tolerance), or on a tolerance-tie with a strictly higher
// marginal. On full ties the incumbent wins, so smaller subsets (visited at
// earlier levels) are preferred.
struct MlseTracker {
  Candidate best;

  void update(const Candidate& candidate) {
    if (candidate.score > best.score + kEpTieTolerance) {
      best = candidate;
    } else if (candidate.score >= best.score - kEpTieTolerance &&
               candidate.marginal > best.marginal) {
      best = candidate;
    }
  }
};

// Best of a level: anchored at the top-ranked candidate, every candidate
// whose score ties it within tolerance competes on marginal probability.
const Candidate& select_level_best(const std::vector<Candidate>& sorted) {
  const Candidate* best = &sorted.front();
  const double anchor = sorted.front().score;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].score < anchor - kEpTieTolerance) break;
    if (sorted[i].marginal > best->marginal) best = &sorted[i];
  }
  return *best;
}

PartialInstance subset_instance(const PartialInstance& x,
                                const std::vector<int>& indices) {
  PartialInstance z(x.num_features());
  for (const int i : indices) z.set(i, x.value(i));
  return z;
}

Explanation to_explanation(const PartialInstance& x,
                           const Candidate& candidate) {
  Explanation out(subset_instance(x, candidate.indices));
  out.ep_logodds = candidate.ep_logodds;
  out.approx_ep = sigmoid(candidate.ep_logodds);
  out.marginal = candidate.marginal;
  out.size = static_cast<int>(candidate.indices.size());
  return out;
}

// Evaluates EP and Pr for every candidate in place; invalid candidates
// (zero-marginal evidence) stay marked invalid. One EP evaluation and one
// marginal evaluation (its denominator) per candidate.
void evaluate_candidates(const Circuit& circuit, const Ensemble& ensemble,
                         const PartialInstance& x, double sign,
                         std::vector<Candidate>& candidates, int threads,
                         BeamStats& stats) {
  const int workers = std::max(1, threads);
  std::vector<MarginalCache> caches(workers);
  parallel_for(candidates.size(), workers, [&](std::size_t i, int worker) {
    Candidate& candidate = candidates[i];
    const PartialInstance z = subset_instance(x, candidate.indices);
    try {
      const ExpectationResult r =
          expected_logodds(circuit, ensemble, z, &caches[worker]);
      candidate.ep_logodds = r.expected_logodds;
      candidate.score = sign * r.expected_logodds;
      candidate.marginal = r.evidence_marginal;
      candidate.valid = true;
    } catch (const ZeroEvidence&) {
      candidate.valid = false;
    }
  });
  stats.ep_evaluations += candidates.size();
  stats.marginal_evaluations += candidates.size();
}

// Expands every beam member by one unused feature, merging duplicate
// subsets produced by different parents.
std::vector<Candidate> expand_level(const std::vector<Candidate>& beam,
                                    int num_features) {
  std::set<std::vector<int>> seen;
  std::vector<Candidate> out;
  for (const Candidate& parent : beam) {
    for (int feature = 0; feature < num_features; ++feature) {
      if (std::binary_search(parent.indices.begin(), parent.indices.end(),
                             feature)) {
        continue;
      }
      std::vector<int> indices = parent.indices;
      indices.insert(
          std::lower_bound(indices.begin(), indices.end(), feature), feature);
      if (seen.insert(indices).second) {
        Candidate child;
        child.indices = std::move(indices);
        out.push_back(std::move(child));
      }
    }
  }
  return out;
}

// The empty-candidate baseline sits outside the expand/select loop, so it
// does not count against the n*k*b evaluation budget tracked in BeamStats.
Candidate evaluate_empty(const Circuit& circuit, const Ensemble& ensemble,
                         const PartialInstance& x, double sign) {
  Candidate empty;
  const ExpectationResult r =
      expected_logodds(circuit, ensemble, PartialInstance(x.num_features()));
  empty.ep_logodds = r.expected_logodds;
  empty.score = sign * r.expected_logodds;
  empty.marginal = r.evidence_marginal;  // 1 by normalization
  empty.valid = true;
  return empty;
}

void check_instance(const Circuit& circuit, const Ensemble& ensemble,
                    const PartialInstance& x) {
  if (circuit.num_features() != ensemble.num_features() ||
      x.num_features() != circuit.num_features()) {
    throw DimensionMismatch("circuit, ensemble and instance disagree on n");
  }
  if (!x.full()) {
    throw IncompleteInstance("explanation search requires a full instance");
  }
  if (circuit.marginal(x) == 0.0) {
    throw ZeroEvidenceInstance(
        "instance has probability 0 under the feature distribution");
  }
}

}  // namespace

BeamResult beam_search_mlse(const Circuit& circuit, const Ensemble& ensemble,
                            const PartialInstance& x, int k, int beam_width,
                            int threads) {
  check_instance(circuit, ensemble, x);
  const int n = x.num_features();
  if (k < 1 || k > n) {
    throw InvalidK("k must be in [1, " + std::to_string(n) + "], got " +
                   std::to_string(k));
  }
  if (beam_width < 1) throw InvalidArgument("beam width must be >= 1");

  BeamResult result;
  result.predicted_class = ensemble.classify(x);
  const double sign = result.predicted_class == 1 ? 1.0 : -1.0;

  MlseTracker tracker;
  tracker.best = evaluate_empty(circuit, ensemble, x, sign);
  result.mlse_score_trace.push_back(tracker.best.score);

  const auto started = std::chrono::steady_clock::now();
  std::vector<Candidate> beam{tracker.best};
  for (int level = 1; level <= k; ++level) {
    std::vector<Candidate> candidates = expand_level(beam, n);
    evaluate_candidates(circuit, ensemble, x, sign, candidates,
                        threads, result.stats);
    std::erase_if(candidates, [](const Candidate& c) { return !c.valid; });
    if (candidates.empty()) break;  // unreachable when Pr(x) > 0
    std::sort(candidates.begin(), candidates.end(), ranks_before);

    result.per_level.push_back(to_explanation(x, select_level_best(candidates)));
    for (const Candidate& candidate : candidates) tracker.update(candidate);
    result.mlse_score_trace.push_back(tracker.best.score);
    result.level_cumulative_millis.push_back(
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - started)
            .count());

    if (candidates.size() > static_cast<std::size_t>(beam_width)) {
      candidates.resize(beam_width);
    }
    beam = std::move(candidates);
  }

  result.mlse = to_explanation(x, tracker.best);
  return result;
}

Explanation exhaustive_mlse(const Circuit& circuit, const Ensemble& ensemble,
                            const PartialInstance& x, int k) {
  check_instance(circuit, ensemble, x);
  const int n = x.num_features();
  if (k < 0 || k > n) throw InvalidK("k must be in [0, n]");
  if (n > 14) {
    throw BudgetExceeded("exhaustive search over n = " + std::to_string(n) +
                         " exceeds the n <= 14 budget");
  }

  const double sign = ensemble.classify(x) == 1 ? 1.0 : -1.0;
  BeamStats stats;
  MlseTracker tracker;
  tracker.best = evaluate_empty(circuit, ensemble, x, sign);

  // Visit sizes in increasing order and, within a size, feed candidates to
  // the tracker in ranking order. This mirrors a beam run at exhaustive
  // width, so the two agree exactly when the beam covers every subset.
  std::vector<int> combo;
  for (int size = 1; size <= k; ++size) {
    std::vector<Candidate> candidates;
    combo.assign(size, 0);
    for (int i = 0; i < size; ++i) combo[i] = i;
    for (;;) {
      Candidate candidate;
      candidate.indices = combo;
      candidates.push_back(std::move(candidate));
      // Next lexicographic combination.
      int pos = size - 1;
      while (pos >= 0 && combo[pos] == n - size + pos) --pos;
      if (pos < 0) break;
      ++combo[pos];
      for (int j = pos + 1; j < size; ++j) combo[j] = combo[j - 1] + 1;
    }
    evaluate_candidates(circuit, ensemble, x, sign, candidates, 1, stats);
    std::erase_if(candidates, [](const Candidate& c) { return !c.valid; });
    std::sort(candidates.begin(), candidates.end(), ranks_before);
    for (const Candidate& candidate : candidates) tracker.update(candidate);
  }
  return to_explanation(x, tracker.best);
}

LogicalResult logical_explanations_bruteforce(const Circuit& circuit,
                                              const Ensemble& ensemble,
                                              const PartialInstance& x,
                                              LogicalMode mode) {
  check_instance(circuit, ensemble, x);
  const int n = x.num_features();
  if (n > 14) {
    throw BudgetExceeded("logical brute force over n = " + std::to_string(n) +
                         " exceeds the n <= 14 budget");
  }
  const int wanted = ensemble.classify(x);

  // True iff every (positive-probability, in distribution-aware mode)
  // completion of the subset keeps the decision.
  const auto is_sufficient = [&](const std::vector<int>& indices) {
    PartialInstance full = subset_instance(x, indices);
    std::vector<int> free_vars;
    for (int i = 0; i < n; ++i) {
      if (!full.has(i)) free_vars.push_back(i);
    }
    const std::uint64_t completions = 1ULL << free_vars.size();
    for (std::uint64_t mask = 0; mask < completions; ++mask) {
      for (std::size_t j = 0; j < free_vars.size(); ++j) {
        full.unset(free_vars[j]);
        full.set(free_vars[j], (mask >> j) & 1);
      }
      if (mode == LogicalMode::kDistributionAware &&
          circuit.marginal(full) == 0.0) {
        continue;
      }
      if (ensemble.classify(full) != wanted) return false;
    }
    return true;
  };

  for (int size = 0; size <= n; ++size) {
    LogicalResult result;
    result.size = size;
    std::vector<int> combo(size);
    for (int i = 0; i < size; ++i) combo[i] = i;
    for (;;) {
      if (is_sufficient(combo)) result.witnesses.push_back(combo);
      if (size == 0) break;
      int pos = size - 1;
      while (pos >= 0 && combo[pos] == n - size + pos) --pos;
      if (pos < 0) break;
      ++combo[pos];
      for (int j = pos + 1; j < size; ++j) combo[j] = combo[j - 1] + 1;
    }
    if (!result.witnesses.empty()) return result;
  }
  // size == n always qualifies (no completions to flip the decision).
  throw NoConsistentLeaf("unreachable: full instance is always sufficient");
}

Explanation ep_threshold_search(const Circuit& circuit,
                                const Ensemble& ensemble,
                                const PartialInstance& x, double ep_min,
                                int beam_width, int threads) {
  check_instance(circuit, ensemble, x);
  if (beam_width < 1) throw InvalidArgument("beam width must be >= 1");
  const int n = x.num_features();
  const double sign = ensemble.classify(x) == 1 ? 1.0 : -1.0;

  BeamStats stats;
  Candidate empty = evaluate_empty(circuit, ensemble, x, sign);
  if (empty.score >= ep_min) return to_explanation(x, empty);
  double best_score = empty.score;

  std::vector<Candidate> beam{empty};
  for (int level = 1; level <= n; ++level) {
    std::vector<Candidate> candidates = expand_level(beam, n);
    evaluate_candidates(circuit, ensemble, x, sign, candidates, threads,
                        stats);
    std::erase_if(candidates, [](const Candidate& c) { return !c.valid; });
    if (candidates.empty()) break;
    std::sort(candidates.begin(), candidates.end(), ranks_before);
    best_score = std::max(best_score, candidates.front().score);

    // First level with a qualifying candidate terminates the search; the
    // most likely qualifying candidate of this size wins.
    const Candidate* winner = nullptr;
    for (const Candidate& candidate : candidates) {
      if (candidate.score < ep_min) continue;
      if (winner == nullptr || candidate.marginal > winner->marginal ||
          (candidate.marginal == winner->marginal &&
           candidate.indices < winner->indices)) {
        winner = &candidate;
      }
    }
    if (winner != nullptr) return to_explanation(x, *winner);

    if (candidates.size() > static_cast<std::size_t>(beam_width)) {
      candidates.resize(beam_width);
    }
    beam = std::move(candidates);
  }
  throw Unreachable("no explanation reaches the requested expected "
                    "prediction; best attained " +
                        std::to_string(best_score),
                    best_score);
}

}  // namespace suffx
