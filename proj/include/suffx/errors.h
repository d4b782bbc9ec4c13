// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_ERRORS_H_
#define SUFFX_ERRORS_H_

#include <stdexcept>
#include <string>

namespace suffx {

// Base class for all errors raised by the library. The CLI maps subclasses
// onto process exit codes; see tools/suffx_main.cpp.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed model or instance files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A loaded model breaks a structural invariant (the message names the
// offending node and the violated property).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Conditioning on evidence with probability zero.
class ZeroEvidence : public Error {
 public:
  using Error::Error;
};

// The instance to explain has probability zero under the feature
// distribution.
class ZeroEvidenceInstance : public Error {
 public:
  using Error::Error;
};

// Two partial instances assign conflicting values to the same feature.
class InconsistentEvidence : public Error {
 public:
  using Error::Error;
};

// An operation requiring a full assignment was given a partial one.
class IncompleteInstance : public Error {
 public:
  using Error::Error;
};

// Circuit and ensemble (or instance) disagree on the feature count.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// An enumeration exceeds the configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// The predictor bound coincides with the decision threshold, so the SDP
// bound denominator vanishes.
class DegenerateBound : public Error {
 public:
  using Error::Error;
};

// The requested epsilon does not admit a valid two-point construction.
class InfeasibleEpsilon : public Error {
 public:
  using Error::Error;
};

// z is not a subset of the instance being explained.
class SubsetViolation : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Explanation size constraint outside [1, n].
class InvalidK : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Threshold search exhausted all levels without meeting the target; carries
// the best expected-prediction score attained (at level n this is the score
// of the full instance).
class Unreachable : public Error {
 public:
  Unreachable(const std::string& what, double best_score)
      : Error(what), best_score_(best_score) {}
  double best_score() const { return best_score_; }

 private:
  double best_score_;
};

// No leaf of some tree is consistent with the evidence. Impossible for
// well-formed trees; kept as a hard failure rather than silent fallback.
class NoConsistentLeaf : public Error {
 public:
  using Error::Error;
};

}  // namespace suffx

#endif  // SUFFX_ERRORS_H_
