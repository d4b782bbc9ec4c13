// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_ORACLE_H_
#define SUFFX_ORACLE_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "suffx/circuit.h"
#include "suffx/ensemble.h"
#include "suffx/instance.h"

// Brute-force reference implementations used to validate the production
// query paths. They deliberately share no traversal code with the rest of
// the library: circuit evaluation is a memoized recursion instead of the
// production bottom-up loop, tree scoring is a separate recursive walker,
// and accumulations use pairwise summation so results do not depend on how
// the enumeration is partitioned. Shipped (not test-only) so the CLI
// `validate` command can audit user-supplied models.
namespace suffx::oracle {

struct EnumerationBudget {
  int max_free_vars = 20;
  long max_subsets = 1L << 20;
};

// Likelihood of a full assignment, by recursive descent from the root.
double likelihood(const Circuit& circuit, const PartialInstance& full);

// Log-odds of a full assignment, by per-tree recursive walk.
double log_odds(const Ensemble& ensemble, const PartialInstance& full);

// Full joint table over {0,1}^n; entry index encodes variable i at bit i.
// Verifies normalization (sum 1 within 1e-9) before returning.
// Budget: n <= 16.
std::vector<double> joint_table(const Circuit& circuit);

// Sum of table entries consistent with the evidence.
double table_marginal(const std::vector<double>& table,
                      const PartialInstance& evidence);

// (exact EP_O, exact EP_f) over all completions of z.
std::pair<double, double> ep_by_enumeration(const Circuit& circuit,
                                            const Ensemble& ensemble,
                                            const PartialInstance& z,
                                            EnumerationBudget budget = {});

// Exact SDP over all completions of z.
double sdp_by_enumeration(const Circuit& circuit, const Ensemble& ensemble,
                          const PartialInstance& x, const PartialInstance& z,
                          EnumerationBudget budget = {});

// Pairwise (tournament) summation; order-independent given the same values.
double stable_sum(const std::vector<double>& values);

}  // namespace suffx::oracle

#endif  // SUFFX_ORACLE_H_
