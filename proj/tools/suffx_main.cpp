// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
//
// suffx: probabilistic sufficient explanations for tree ensembles.
//
//   suffx <explain|sweep|tradeoff|logical|validate|sample|convert>
//         --circuit F --ensemble F --instances F
//         [--k N] [--beam N] [--samples N] [--seed N] [--threads N]
//         [--ep-min X] [--mode worst|dist] [--out F]

#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "suffx/cli.h"
#include "suffx/errors.h"

namespace {

using suffx::cli::RunConfig;

void add_model_options(CLI::App* cmd, RunConfig& config,
                       bool need_instances = true) {
  cmd->add_option("--circuit", config.circuit_path, "circuit file")
      ->required();
  cmd->add_option("--ensemble", config.ensemble_path, "ensemble file")
      ->required();
  auto* instances =
      cmd->add_option("--instances", config.instances_path, "instances file");
  if (need_instances) instances->required();
}

void add_common_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--k", config.k, "maximum explanation size");
  cmd->add_option("--beam", config.beam_width, "beam width");
  cmd->add_option("--samples", config.samples, "SDP sample count");
  cmd->add_option("--seed", config.seed, "random seed");
  cmd->add_option("--threads", config.threads, "worker threads");
  cmd->add_option("--out", config.out_path, "output file");
}

int run(const std::function<int()>& body) {
  try {
    return body();
  } catch (const suffx::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return suffx::cli::kBudgetExceeded;
  } catch (const suffx::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return suffx::cli::kUsage;
  } catch (const suffx::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return suffx::cli::kParseFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probabilistic sufficient explanations for tree ensembles"};
  app.require_subcommand(1);

  RunConfig config;
  std::string mode = "worst";

  CLI::App* explain = app.add_subcommand(
      "explain", "beam-search explanations with SDP guarantees");
  add_model_options(explain, config);
  add_common_options(explain, config);
  double ep_min = 0.0;
  CLI::Option* ep_min_opt = explain->add_option(
      "--ep-min", ep_min,
      "return the smallest explanation whose expected prediction score "
      "reaches this value");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "per-size SDP estimate and bound means (plot data)");
  add_model_options(sweep, config);
  add_common_options(sweep, config);

  CLI::App* tradeoff = app.add_subcommand(
      "tradeoff", "expected prediction vs marginal probability scatter data");
  add_model_options(tradeoff, config);
  add_common_options(tradeoff, config);

  CLI::App* logical = app.add_subcommand(
      "logical", "brute-force logical explanations vs MLSE sizes");
  add_model_options(logical, config);
  add_common_options(logical, config);
  logical->add_option("--mode", mode, "worst or dist")
      ->check(CLI::IsMember({"worst", "dist"}));
  logical->add_option("--sdp-target", config.sdp_target,
                      "exact-SDP target for the MLSE size column");

  CLI::App* validate = app.add_subcommand(
      "validate", "audit models against brute-force oracles");
  add_model_options(validate, config, /*need_instances=*/false);
  add_common_options(validate, config);
  validate->add_option("--inject", config.inject,
                       "fault injection self-test: marginal-skew or "
                       "ep-drop-leaf");

  CLI::App* sample = app.add_subcommand(
      "sample", "draw conditional samples from the circuit");
  sample->add_option("--circuit", config.circuit_path, "circuit file")
      ->required();
  sample->add_option("--given", config.given,
                     "evidence, e.g. \"X3=1,X0=0\"");
  add_common_options(sample, config);

  CLI::App* convert = app.add_subcommand(
      "convert", "boosted-tree text dump -> ensemble file (best effort)");
  convert->add_option("--in", config.in_path,
                      "dump file (default: read stdin)");
  convert->add_option("--out", config.out_path, "output file");
  convert->add_option("--n", config.n_override, "feature count override");
  convert->add_option("--base-score", config.base_score,
                      "base log-odds offset");
  convert->add_option("--threshold", config.decision_threshold,
                      "decision threshold in log-odds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message / help text
    return code == 0 ? 0 : suffx::cli::kUsage;
  }

  if (*ep_min_opt) config.ep_min = ep_min;
  config.mode = mode == "dist" ? suffx::LogicalMode::kDistributionAware
                               : suffx::LogicalMode::kWorstCase;

  if (explain->parsed()) {
    return run([&] {
      return suffx::cli::cmd_explain(config, std::cout, std::cerr);
    });
  }
  if (sweep->parsed()) {
    return run(
        [&] { return suffx::cli::cmd_sweep(config, std::cout, std::cerr); });
  }
  if (tradeoff->parsed()) {
    return run([&] {
      return suffx::cli::cmd_tradeoff(config, std::cout, std::cerr);
    });
  }
  if (logical->parsed()) {
    return run(
        [&] { return suffx::cli::cmd_logical(config, std::cout, std::cerr); });
  }
  if (validate->parsed()) {
    return run([&] {
      return suffx::cli::cmd_validate(config, std::cout, std::cerr);
    });
  }
  if (sample->parsed()) {
    return run(
        [&] { return suffx::cli::cmd_sample(config, std::cout, std::cerr); });
  }
  if (convert->parsed()) {
    return run(
        [&] { return suffx::cli::cmd_convert(config, std::cout, std::cerr); });
  }
  return suffx::cli::kUsage;
}
