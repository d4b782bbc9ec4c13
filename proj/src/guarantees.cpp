// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/guarantees.h"

#include <atomic>
#include <cmath>
#include <string>
#include <vector>

#include "suffx/errors.h"
#include "suffx/threading.h"

namespace suffx {

SdpEstimate sdp_sample(const Circuit& circuit, const Ensemble& ensemble,
                       const PartialInstance& x, const PartialInstance& z,
                       long samples, std::uint64_t seed, int threads) {
  if (samples < 1) throw InvalidArgument("sample count must be >= 1");
  if (!x.full()) throw IncompleteInstance("sdp_sample requires a full x");
  if (!z.subset_of(x)) {
    throw SubsetViolation("explanation must be a subset of the instance");
  }
  const int wanted = ensemble.classify(x);
  ConditionalSampler sampler(circuit, z);

  constexpr long kChunk = 4096;
  const std::size_t num_chunks = (samples + kChunk - 1) / kChunk;
  std::atomic<long> matches{0};
  parallel_for(num_chunks, threads, [&](std::size_t chunk, int) {
    Rng rng(derive_seed(seed, chunk));
    PartialInstance sample(circuit.num_features());
    const long begin = static_cast<long>(chunk) * kChunk;
    const long end = std::min(samples, begin + kChunk);
    long local = 0;
    for (long i = begin; i < end; ++i) {
      sampler.sample_into(rng, sample);
      if (ensemble.classify(sample) == wanted) ++local;
    }
    matches.fetch_add(local);
  });

  SdpEstimate estimate;
  estimate.samples = samples;
  estimate.seed = seed;
  estimate.value = static_cast<double>(matches.load()) /
                   static_cast<double>(samples);
  estimate.std_error =
      std::sqrt(estimate.value * (1.0 - estimate.value) / samples);
  return estimate;
}

double sdp_exact_smallcase(const Circuit& circuit, const Ensemble& ensemble,
                           const PartialInstance& x, const PartialInstance& z,
                           int max_free_vars) {
  if (!x.full()) throw IncompleteInstance("sdp requires a full x");
  if (!z.subset_of(x)) {
    throw SubsetViolation("explanation must be a subset of the instance");
  }
  std::vector<int> free_vars;
  for (int i = 0; i < z.num_features(); ++i) {
    if (!z.has(i)) free_vars.push_back(i);
  }
  if (static_cast<int>(free_vars.size()) > max_free_vars) {
    throw BudgetExceeded("exact SDP over " + std::to_string(free_vars.size()) +
                         " free variables exceeds budget of " +
                         std::to_string(max_free_vars));
  }
  const double pz = circuit.marginal(z);
  if (pz == 0.0) throw ZeroEvidence("exact SDP: Pr(z) = 0");
  const int wanted = ensemble.classify(x);

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
    if (ensemble.classify(full) == wanted) acc += p;
  }
  return acc / pz;
}

SdpBound sdp_lower_bound(const Circuit& circuit, const Ensemble& ensemble,
                         const PartialInstance& x, const PartialInstance& z,
                         BoundVariant variant) {
  if (!x.full()) throw IncompleteInstance("sdp bound requires a full x");
  if (!z.subset_of(x)) {
    throw SubsetViolation("explanation must be a subset of the instance");
  }
  const int cls = ensemble.classify(x);
  const ExpectationResult ep = expected_logodds(circuit, ensemble, z);

  SdpBound bound;
  bound.variant = variant;
  if (variant == BoundVariant::kLogOddsExact) {
    const double T = ensemble.threshold();
    bound.threshold = T;
    bound.ep_used = ep.expected_logodds;
    if (cls == 1) {
      const double U = ensemble.upper_bound_log_odds(z);
      if (U == T) {
        throw DegenerateBound("U(z) equals the decision threshold");
      }
      bound.bound_limit = U;
      bound.value = (ep.expected_logodds - T) / (U - T);
    } else {
      const double L = ensemble.lower_bound_log_odds(z);
      if (L == T) {
        throw DegenerateBound("L(z) equals the decision threshold");
      }
      bound.bound_limit = L;
      bound.value = (T - ep.expected_logodds) / (T - L);
    }
  } else {
    // Probability space: threshold 0.5, trivial limits U = 1 / L = 0.
    const double F = ep.approx_expected_prediction;
    bound.threshold = 0.5;
    bound.ep_used = F;
    if (cls == 1) {
      bound.bound_limit = 1.0;
      bound.value = (F - 0.5) / 0.5;
    } else {
      bound.bound_limit = 0.0;
      bound.value = (0.5 - F) / 0.5;
    }
  }
  return bound;
}

TwoPointDistribution tightness_construction(double F, double U, double T,
                                            double epsilon) {
  if (!(F < T && T < U)) {
    throw InvalidArgument("tightness construction requires F < T < U");
  }
  if (!(epsilon > 0.0)) {
    throw InfeasibleEpsilon("epsilon must be strictly positive");
  }
  const double lower_mass = (U - F) / (U - T) - epsilon;
  if (!(lower_mass > 0.0)) {
    throw InfeasibleEpsilon("epsilon too large: lower mass would be <= 0");
  }
  TwoPointDistribution dist;
  dist.upper_point = U;
  dist.upper_mass = (F - T) / (U - T) + epsilon;
  dist.lower_mass = lower_mass;
  dist.lower_point =
      (T * (U - F) - U * (U - T) * epsilon) / ((U - F) - (U - T) * epsilon);
  return dist;
}

}  // namespace suffx
