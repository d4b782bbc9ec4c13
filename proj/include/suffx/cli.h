// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_CLI_H_
#define SUFFX_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "suffx/search.h"

namespace suffx::cli {

// Exit codes shared by every subcommand.
enum ExitCode {
  kOk = 0,
  kUsage = 1,
  kParseFailure = 2,
  kValidationFailure = 3,
  kBudgetExceeded = 4,
};

struct RunConfig {
  std::string circuit_path;
  std::string ensemble_path;
  std::string instances_path;
  std::string out_path;  // empty: primary output goes to the stream
  std::string in_path;   // convert input; empty reads stdin

  int k = 3;
  int beam_width = 5;
  long samples = 10000;
  std::uint64_t seed = 1;
  int threads = 1;

  std::optional<double> ep_min;            // explain: threshold-search mode
  LogicalMode mode = LogicalMode::kWorstCase;  // logical
  double sdp_target = 0.95;                // logical: MLSE comparison target

  // sample: evidence as "X3=1,X0=0"
  std::string given;

  // validate: fault injection for self-testing the checks
  // ("marginal-skew" or "ep-drop-leaf").
  std::string inject;

  // convert
  double base_score = 0.0;
  double decision_threshold = 0.0;
  int n_override = -1;

  void validate() const;  // throws InvalidArgument
};

// Per-instance explanation report: aligned human table on `out`, one JSON
// record per instance appended to config.out_path when set. Timing goes to
// `diag` so the primary output is byte-identical across thread counts.
int cmd_explain(const RunConfig& config, std::ostream& out,
                std::ostream& diag);

// Per-size aggregate of SDP estimates and both bounds, as a delimited table
// with the fixed header
// size,sdp_mean,sdp_sd,bound_logodds_mean,bound_logodds_sd,bound_approx_mean,bound_approx_sd
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& diag);

// Scatter data: one (approx EP, log Pr) point per instance and explanation
// size, tagged with the predicted class.
int cmd_tradeoff(const RunConfig& config, std::ostream& out,
                 std::ostream& diag);

// Logical-vs-probabilistic comparison: minimum logical explanation sizes
// (both modes) against the smallest explanation size whose exact SDP
// reaches config.sdp_target.
int cmd_logical(const RunConfig& config, std::ostream& out,
                std::ostream& diag);

// Oracle-agreement audit of the supplied models; one line per check,
// exit 3 on any failure. Budget-exceeded checks are skipped, not failed.
int cmd_validate(const RunConfig& config, std::ostream& out,
                 std::ostream& diag);

// Conditional samples from the circuit as delimited 0/1 rows.
int cmd_sample(const RunConfig& config, std::ostream& out, std::ostream& diag);

// Best-effort conversion of a boosted-tree text dump into the ensemble file
// format.
int cmd_convert(const RunConfig& config, std::ostream& out,
                std::ostream& diag);

}  // namespace suffx::cli

#endif  // SUFFX_CLI_H_
