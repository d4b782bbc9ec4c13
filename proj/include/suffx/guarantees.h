// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_GUARANTEES_H_
#define SUFFX_GUARANTEES_H_

#include <cstdint>

#include "suffx/circuit.h"
#include "suffx/ensemble.h"
#include "suffx/expectation.h"
#include "suffx/instance.h"

namespace suffx {

// Monte-Carlo estimate of the same-decision probability.
struct SdpEstimate {
  double value = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  // Binomial: sqrt(value * (1 - value) / samples).
  double std_error = 0.0;
};

enum class BoundVariant {
  // (EP_O(z) - T) / (U(z) - T) in log-odds space with the per-tree
  // consistent-leaf bound U. A guaranteed strict lower bound on the SDP.
  kLogOddsExact,
  // (sigmoid(EP_O) - 0.5) / (1 - 0.5) in probability space with the trivial
  // bound U = 1. Not guaranteed: sigmoid(EP_O) only approximates the exact
  // expected prediction.
  kApproxPrediction,
};

struct SdpBound {
  // May be negative (vacuous); clamped to [0, 1] only when reported.
  double value = 0.0;
  BoundVariant variant = BoundVariant::kLogOddsExact;
  // Expected prediction fed into the bound (log-odds or probability space
  // depending on the variant).
  double ep_used = 0.0;
  // U(z) for positive-class instances, L(z) for negative-class.
  double bound_limit = 0.0;
  double threshold = 0.0;

  bool guaranteed() const { return variant == BoundVariant::kLogOddsExact; }
};

// Fraction of conditional samples m ~ Pr(M | z) whose completion zm keeps
// the classifier's decision on x. Deterministic in seed and independent of
// thread count (fixed-size sample chunks with derived seeds).
// Requires z ⊆ x and Pr(z) > 0.
SdpEstimate sdp_sample(const Circuit& circuit, const Ensemble& ensemble,
                       const PartialInstance& x, const PartialInstance& z,
                       long samples, std::uint64_t seed, int threads = 1);

// Exact SDP by completion enumeration; small cases only.
double sdp_exact_smallcase(const Circuit& circuit, const Ensemble& ensemble,
                           const PartialInstance& x, const PartialInstance& z,
                           int max_free_vars = 20);

// Analytic lower bound on the SDP from the expected prediction. For
// positive-class x the log-odds variant uses U(z) = upper_bound_log_odds(z)
// and requires U > T; for negative-class x the mirrored form
// (T - EP) / (T - L) with L = lower_bound_log_odds(z) is used.
SdpBound sdp_lower_bound(const Circuit& circuit, const Ensemble& ensemble,
                         const PartialInstance& x, const PartialInstance& z,
                         BoundVariant variant);

// Two-point distribution {(upper_point, upper_mass), (lower_point,
// lower_mass)} with mean F whose SDP exceeds the analytic bound by exactly
// epsilon. Demonstrates the bound is approached arbitrarily closely.
struct TwoPointDistribution {
  double upper_point = 0.0;  // = U
  double upper_mass = 0.0;   // (F - T) / (U - T) + epsilon
  double lower_point = 0.0;  // = A, always < T
  double lower_mass = 0.0;   // (U - F) / (U - T) - epsilon

  double mean() const {
    return upper_point * upper_mass + lower_point * lower_mass;
  }
  // Probability mass at or above the threshold.
  double sdp(double threshold) const {
    double p = 0.0;
    if (upper_point >= threshold) p += upper_mass;
    if (lower_point >= threshold) p += lower_mass;
    return p;
  }
};

// Requires F < T < U, epsilon > 0 and small enough that lower_mass > 0
// (which also forces lower_point < T). For epsilon below (T-F)/(U-T) the
// upper mass is negative and the result is an algebraic certificate rather
// than a proper distribution; mean and SDP identities still hold exactly.
TwoPointDistribution tightness_construction(double F, double U, double T,
                                            double epsilon);

}  // namespace suffx

#endif  // SUFFX_GUARANTEES_H_
