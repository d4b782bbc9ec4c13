// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "suffx/circuit.h"
#include "suffx/dataset.h"
#include "suffx/ensemble.h"
#include "suffx/errors.h"
#include "suffx/expectation.h"
#include "suffx/guarantees.h"
#include "suffx/oracle.h"
#include "suffx/rng.h"

namespace suffx::cli {

namespace {

using nlohmann::json;

std::string fmt(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.15g", value);
  return buffer;
}

double clamp01(double value) { return std::clamp(value, 0.0, 1.0); }

// Report invariant: log Pr <= 0. Renormalized weights can leave the root
// marginal one ulp above 1.
double log_pr(double marginal) { return std::min(0.0, std::log(marginal)); }

struct LoadedInputs {
  Circuit circuit;
  Ensemble ensemble;
  InstanceSet instances;
};

LoadedInputs load_inputs(const RunConfig& config, bool need_instances = true) {
  Circuit circuit = load_circuit_file(config.circuit_path);
  Ensemble ensemble = load_ensemble_file(config.ensemble_path);
  if (circuit.num_features() != ensemble.num_features()) {
    throw DimensionMismatch("circuit and ensemble disagree on feature count");
  }
  InstanceSet instances;
  if (need_instances) {
    instances =
        load_instances_file(config.instances_path, circuit.num_features());
  }
  return {std::move(circuit), std::move(ensemble), std::move(instances)};
}

std::string subset_string(const Explanation& expl,
                          const std::vector<std::string>& names) {
  std::string out = "{";
  bool first = true;
  for (const int i : expl.subset.assigned_indices()) {
    if (!first) out += ",";
    first = false;
    out += names[i];
    out += expl.subset.value(i) ? "=1" : "=0";
  }
  out += "}";
  return out;
}

// Seed stream layout: instance block of 1024 streams; level ell uses
// stream base + ell, the tracked optimum uses base + 1023.
std::uint64_t level_seed(std::uint64_t seed, std::size_t instance, int level) {
  return derive_seed(seed, instance * 1024 + static_cast<std::uint64_t>(level));
}
std::uint64_t mlse_seed(std::uint64_t seed, std::size_t instance) {
  return derive_seed(seed, instance * 1024 + 1023);
}

void annotate(const Circuit& circuit, const Ensemble& ensemble,
              const PartialInstance& x, Explanation& expl, long samples,
              std::uint64_t seed, int threads) {
  expl.sdp_estimate =
      sdp_sample(circuit, ensemble, x, expl.subset, samples, seed, threads);
  expl.bound_logodds = sdp_lower_bound(circuit, ensemble, x, expl.subset,
                                       BoundVariant::kLogOddsExact);
  expl.bound_approx = sdp_lower_bound(circuit, ensemble, x, expl.subset,
                                      BoundVariant::kApproxPrediction);
}

json explanation_json(const Explanation& expl,
                      const std::vector<std::string>& names) {
  json subset = json::array();
  for (const int i : expl.subset.assigned_indices()) {
    subset.push_back({{"index", i},
                      {"name", names[i]},
                      {"value", expl.subset.value(i) ? 1 : 0}});
  }
  json out{{"size", expl.size},
           {"subset", std::move(subset)},
           {"ep_logodds", expl.ep_logodds},
           {"approx_ep", expl.approx_ep},
           {"pr", expl.marginal},
           {"log_pr", log_pr(expl.marginal)}};
  if (expl.sdp_estimate) {
    out["sdp"] = expl.sdp_estimate->value;
    out["sdp_std_error"] = expl.sdp_estimate->std_error;
    out["sdp_samples"] = expl.sdp_estimate->samples;
  }
  if (expl.bound_logodds) {
    out["bound_logodds"] = expl.bound_logodds->value;
    out["bound_logodds_clamped"] = clamp01(expl.bound_logodds->value);
  }
  if (expl.bound_approx) {
    out["bound_approx"] = expl.bound_approx->value;
    out["bound_approx_clamped"] = clamp01(expl.bound_approx->value);
  }
  return out;
}

void print_explanation_row(std::ostream& out, const std::string& tag,
                           const Explanation& expl,
                           const std::vector<std::string>& names) {
  char line[512];
  std::snprintf(
      line, sizeof(line),
      "%4s  %-36s %11.6f %10.6f %11.6f %10.6f %9.6f %10.6f %10.6f\n",
      tag.c_str(), subset_string(expl, names).c_str(), expl.ep_logodds,
      expl.approx_ep, log_pr(expl.marginal),
      expl.sdp_estimate ? expl.sdp_estimate->value : 0.0,
      expl.sdp_estimate ? expl.sdp_estimate->std_error : 0.0,
      expl.bound_logodds ? expl.bound_logodds->value : 0.0,
      expl.bound_approx ? expl.bound_approx->value : 0.0);
  out << line;
}

std::ofstream open_out_file(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw InvalidArgument("cannot open output file: " + path);
  return file;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (const double v : values) sum += v;
  out.mean = sum / values.size();
  if (values.size() < 2) return out;
  double acc = 0.0;
  for (const double v : values) acc += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(acc / (values.size() - 1));
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (k < 1) throw InvalidArgument("--k must be >= 1");
  if (beam_width < 1) throw InvalidArgument("--beam must be >= 1");
  if (samples < 1) throw InvalidArgument("--samples must be >= 1");
  if (threads < 1) throw InvalidArgument("--threads must be >= 1");
}

int cmd_explain(const RunConfig& config, std::ostream& out,
                std::ostream& diag) {
  config.validate();
  LoadedInputs inputs = load_inputs(config);
  const auto& names = inputs.instances.feature_names;

  std::ofstream machine;
  if (!config.out_path.empty()) machine = open_out_file(config.out_path);

  for (std::size_t idx = 0; idx < inputs.instances.size(); ++idx) {
    const PartialInstance& x = inputs.instances.instances[idx];
    const auto started = std::chrono::steady_clock::now();

    json record{{"instance", idx}};
    if (inputs.instances.labels[idx]) {
      record["label"] = *inputs.instances.labels[idx];
    }
    const double log_odds_x = inputs.ensemble.log_odds(x);
    const int cls = inputs.ensemble.classify(x);
    record["class"] = cls;
    record["log_odds"] = log_odds_x;
    record["log_pr_x"] = inputs.circuit.log_marginal(x);

    char header[256];
    std::snprintf(header, sizeof(header),
                  "instance %zu  class=%d  O(x)=%.6f  logPr(x)=%.6f\n", idx,
                  cls, log_odds_x, inputs.circuit.log_marginal(x));
    out << header;
    std::snprintf(header, sizeof(header),
                  "%4s  %-36s %11s %10s %11s %10s %9s %10s %10s\n", "size",
                  "subset", "EP_O", "sigmoid", "logPr(z)", "SDP~", "std.err",
                  "bnd_O", "bnd_f");
    out << header;

    if (config.ep_min) {
      try {
        Explanation expl =
            ep_threshold_search(inputs.circuit, inputs.ensemble, x,
                                *config.ep_min, config.beam_width,
                                config.threads);
        annotate(inputs.circuit, inputs.ensemble, x, expl, config.samples,
                 mlse_seed(config.seed, idx), config.threads);
        print_explanation_row(out, std::to_string(expl.size), expl, names);
        record["ep_min"] = *config.ep_min;
        record["explanation"] = explanation_json(expl, names);
      } catch (const Unreachable& unreachable) {
        out << "  ep-min " << fmt(*config.ep_min)
            << " unreachable; best score " << fmt(unreachable.best_score())
            << "\n";
        record["ep_min"] = *config.ep_min;
        record["unreachable_best_score"] = unreachable.best_score();
      }
    } else {
      const int k = std::min(config.k, x.num_features());
      BeamResult result =
          beam_search_mlse(inputs.circuit, inputs.ensemble, x, k,
                           config.beam_width, config.threads);
      json levels = json::array();
      for (std::size_t level = 0; level < result.per_level.size(); ++level) {
        Explanation& expl = result.per_level[level];
        annotate(inputs.circuit, inputs.ensemble, x, expl, config.samples,
                 level_seed(config.seed, idx, static_cast<int>(level) + 1),
                 config.threads);
        print_explanation_row(out, std::to_string(expl.size), expl, names);
        levels.push_back(explanation_json(expl, names));
      }
      annotate(inputs.circuit, inputs.ensemble, x, result.mlse, config.samples,
               mlse_seed(config.seed, idx), config.threads);
      print_explanation_row(out, "MLSE", result.mlse, names);
      record["levels"] = std::move(levels);
      record["mlse"] = explanation_json(result.mlse, names);
      record["counters"] = {
          {"ep_evaluations", result.stats.ep_evaluations},
          {"marginal_evaluations", result.stats.marginal_evaluations}};
      diag << "# instance " << idx << " cumulative level ms:";
      for (const double ms : result.level_cumulative_millis) {
        diag << " " << ms;
      }
      diag << "\n";
    }
    out << "\n";

    const double total_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - started)
            .count();
    diag << "# instance " << idx << " wall ms: " << total_ms << "\n";
    if (machine.is_open()) machine << record.dump() << "\n";
  }
  return kOk;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  config.validate();
  LoadedInputs inputs = load_inputs(config);
  const int k = std::min(config.k, inputs.circuit.num_features());

  std::vector<std::vector<double>> sdp_by_size(k + 1);
  std::vector<std::vector<double>> bound_logodds_by_size(k + 1);
  std::vector<std::vector<double>> bound_approx_by_size(k + 1);

  for (std::size_t idx = 0; idx < inputs.instances.size(); ++idx) {
    const PartialInstance& x = inputs.instances.instances[idx];
    BeamResult result = beam_search_mlse(inputs.circuit, inputs.ensemble, x, k,
                                         config.beam_width, config.threads);
    for (std::size_t level = 0; level < result.per_level.size(); ++level) {
      Explanation& expl = result.per_level[level];
      annotate(inputs.circuit, inputs.ensemble, x, expl, config.samples,
               level_seed(config.seed, idx, static_cast<int>(level) + 1),
               config.threads);
      const int size = expl.size;
      sdp_by_size[size].push_back(expl.sdp_estimate->value);
      bound_logodds_by_size[size].push_back(expl.bound_logodds->value);
      bound_approx_by_size[size].push_back(expl.bound_approx->value);
    }
  }

  std::ofstream file;
  std::ostream* table = &out;
  if (!config.out_path.empty()) {
    file = open_out_file(config.out_path);
    table = &file;
  }
  *table << "size,sdp_mean,sdp_sd,bound_logodds_mean,bound_logodds_sd,"
            "bound_approx_mean,bound_approx_sd\n";
  for (int size = 1; size <= k; ++size) {
    if (sdp_by_size[size].empty()) continue;
    const MeanSd sdp = mean_sd(sdp_by_size[size]);
    const MeanSd bo = mean_sd(bound_logodds_by_size[size]);
    const MeanSd ba = mean_sd(bound_approx_by_size[size]);
    *table << size << "," << fmt(sdp.mean) << "," << fmt(sdp.sd) << ","
           << fmt(bo.mean) << "," << fmt(bo.sd) << "," << fmt(ba.mean) << ","
           << fmt(ba.sd) << "\n";
  }
  diag << "# sweep over " << inputs.instances.size() << " instances, sizes 1.."
       << k << "\n";
  return kOk;
}

int cmd_tradeoff(const RunConfig& config, std::ostream& out,
                 std::ostream& diag) {
  config.validate();
  LoadedInputs inputs = load_inputs(config);
  const int k = std::min(config.k, inputs.circuit.num_features());

  std::ofstream file;
  std::ostream* table = &out;
  if (!config.out_path.empty()) {
    file = open_out_file(config.out_path);
    table = &file;
  }
  *table << "instance,class,size,approx_ep,log_pr\n";
  for (std::size_t idx = 0; idx < inputs.instances.size(); ++idx) {
    const PartialInstance& x = inputs.instances.instances[idx];
    BeamResult result = beam_search_mlse(inputs.circuit, inputs.ensemble, x, k,
                                         config.beam_width, config.threads);
    for (const Explanation& expl : result.per_level) {
      *table << idx << "," << result.predicted_class << "," << expl.size << ","
             << fmt(expl.approx_ep) << "," << fmt(log_pr(expl.marginal))
             << "\n";
    }
  }
  diag << "# tradeoff over " << inputs.instances.size() << " instances\n";
  return kOk;
}

int cmd_logical(const RunConfig& config, std::ostream& out,
                std::ostream& diag) {
  config.validate();
  LoadedInputs inputs = load_inputs(config);
  const int n = inputs.circuit.num_features();

  std::ofstream file;
  std::ostream* table = &out;
  if (!config.out_path.empty()) {
    file = open_out_file(config.out_path);
    table = &file;
  }
  *table << "instance,class,logical_worst_size,logical_dist_size,"
            "mlse_sdp95_size,num_features\n";

  double worst_fraction = 0.0;
  double dist_fraction = 0.0;
  double mlse_fraction = 0.0;
  for (std::size_t idx = 0; idx < inputs.instances.size(); ++idx) {
    const PartialInstance& x = inputs.instances.instances[idx];
    const LogicalResult worst = logical_explanations_bruteforce(
        inputs.circuit, inputs.ensemble, x, LogicalMode::kWorstCase);
    const LogicalResult dist = logical_explanations_bruteforce(
        inputs.circuit, inputs.ensemble, x, LogicalMode::kDistributionAware);

    // Smallest explanation size whose exact SDP reaches the target; the
    // empty explanation counts as size 0, and size n always reaches 1.
    int mlse_size = -1;
    if (sdp_exact_smallcase(inputs.circuit, inputs.ensemble, x,
                            PartialInstance(n)) >= config.sdp_target) {
      mlse_size = 0;
    } else {
      BeamResult result = beam_search_mlse(inputs.circuit, inputs.ensemble, x,
                                           n, config.beam_width,
                                           config.threads);
      for (const Explanation& expl : result.per_level) {
        if (sdp_exact_smallcase(inputs.circuit, inputs.ensemble, x,
                                expl.subset) >= config.sdp_target) {
          mlse_size = expl.size;
          break;
        }
      }
    }

    *table << idx << "," << inputs.ensemble.classify(x) << "," << worst.size
           << "," << dist.size << "," << mlse_size << "," << n << "\n";
    worst_fraction += static_cast<double>(worst.size) / n;
    dist_fraction += static_cast<double>(dist.size) / n;
    mlse_fraction += static_cast<double>(mlse_size) / n;
  }
  const double count = static_cast<double>(inputs.instances.size());
  if (count > 0) {
    *table << "# mean_logical_worst_fraction=" << fmt(worst_fraction / count)
           << "\n";
    *table << "# mean_logical_dist_fraction=" << fmt(dist_fraction / count)
           << "\n";
    *table << "# mean_mlse_sdp" << fmt(config.sdp_target * 100)
           << "_fraction=" << fmt(mlse_fraction / count) << "\n";
  }
  diag << "# logical comparison over " << inputs.instances.size()
       << " instances\n";
  return kOk;
}

namespace {

PartialInstance random_evidence(Rng& rng, int n, double density) {
  PartialInstance evidence(n);
  for (int i = 0; i < n; ++i) {
    if (rng.coin(density)) evidence.set(i, rng.coin(0.5));
  }
  return evidence;
}

struct CheckReporter {
  std::ostream& out;
  bool any_failed = false;

  void pass(const std::string& name) { out << "[ ok ] " << name << "\n"; }
  void fail(const std::string& name, const std::string& detail) {
    any_failed = true;
    out << "[FAIL] " << name << ": " << detail << "\n";
  }
  void skip(const std::string& name, const std::string& why) {
    out << "[skip] " << name << " (" << why << ")\n";
  }
};

}  // namespace

int cmd_validate(const RunConfig& config, std::ostream& out,
                 std::ostream& diag) {
  config.validate();
  Circuit circuit = load_circuit_file(config.circuit_path);
  Ensemble ensemble = load_ensemble_file(config.ensemble_path);
  if (circuit.num_features() != ensemble.num_features()) {
    throw DimensionMismatch("circuit and ensemble disagree on feature count");
  }
  const int n = circuit.num_features();
  CheckReporter report{out};

  const bool skew_marginal = config.inject == "marginal-skew";
  const bool drop_leaf = config.inject == "ep-drop-leaf";
  if (!config.inject.empty() && !skew_marginal && !drop_leaf) {
    throw InvalidArgument("unknown --inject fault: " + config.inject);
  }

  // Production-side ensemble; the ep-drop-leaf fault perturbs one leaf so
  // the EP check must detect the disagreement with the pristine model.
  std::optional<Ensemble> mutated;
  if (drop_leaf) {
    std::vector<Tree> trees;
    for (std::size_t t = 0; t < ensemble.tree_count(); ++t) {
      trees.push_back(ensemble.tree(t));
    }
    for (TreeNode& node : trees[0].nodes) {
      if (node.is_leaf()) {
        node.leaf_weight += 0.1;
        break;
      }
    }
    mutated.emplace(std::move(trees), ensemble.base_score(),
                    ensemble.threshold(), n);
  }
  const Ensemble& production_ensemble = mutated ? *mutated : ensemble;

  std::vector<double> table;
  if (n <= 16) {
    try {
      table = oracle::joint_table(circuit);
      report.pass("joint table normalizes to 1");
    } catch (const InvariantViolation& e) {
      report.fail("joint table normalizes to 1", e.what());
    }
  } else {
    report.skip("joint table normalizes to 1", "n > 16");
  }

  if (!table.empty()) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      Rng rng(derive_seed(config.seed, 1000 + i));
      const PartialInstance evidence = random_evidence(rng, n, 0.4);
      double produced = circuit.marginal(evidence);
      if (skew_marginal) produced *= 1.0 + 1e-6;
      worst = std::max(worst,
                       std::abs(produced - oracle::table_marginal(table,
                                                                  evidence)));
    }
    if (worst <= 1e-10) {
      report.pass("marginal matches joint-table enumeration");
    } else {
      report.fail("marginal matches joint-table enumeration",
                  "max deviation " + fmt(worst));
    }
  } else {
    report.skip("marginal matches joint-table enumeration", "no table");
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      Rng rng(derive_seed(config.seed, 2000 + i));
      PartialInstance evidence = random_evidence(rng, n, 0.3);
      int var = static_cast<int>(rng.uniform_int(n));
      if (evidence.has(var)) evidence.unset(var);
      const double base = circuit.marginal(evidence);
      PartialInstance e1 = evidence;
      e1.set(var, true);
      PartialInstance e0 = evidence;
      e0.set(var, false);
      worst = std::max(worst, std::abs(circuit.marginal(e1) +
                                       circuit.marginal(e0) - base));
    }
    if (worst <= 1e-10) {
      report.pass("law of total probability");
    } else {
      report.fail("law of total probability", "max deviation " + fmt(worst));
    }
  }

  {
    ConditionalSampler sampler(circuit, PartialInstance(n));
    double worst = 0.0;
    bool partition_ok = true;
    PartialInstance x(n);
    for (int i = 0; i < 200; ++i) {
      Rng rng(derive_seed(config.seed, 3000 + i));
      sampler.sample_into(rng, x);
      worst = std::max(worst, std::abs(ensemble.log_odds(x) -
                                       oracle::log_odds(ensemble, x)));
      for (const auto& paths : ensemble.leaf_paths()) {
        int consistent = 0;
        for (const PathConjunction& path : paths) {
          if (path.consistent_with(x)) ++consistent;
        }
        if (consistent != 1) partition_ok = false;
      }
    }
    if (worst <= 1e-12) {
      report.pass("log-odds matches independent tree walk");
    } else {
      report.fail("log-odds matches independent tree walk",
                  "max deviation " + fmt(worst));
    }
    if (partition_ok) {
      report.pass("leaf paths partition every full instance");
    } else {
      report.fail("leaf paths partition every full instance",
                  "some instance reaches != 1 path in a tree");
    }
  }

  {
    bool budget_hit = false;
    double worst = 0.0;
    double worst_sandwich = 0.0;
    for (int i = 0; i < 20; ++i) {
      Rng rng(derive_seed(config.seed, 4000 + i));
      const PartialInstance z = random_evidence(rng, n, 0.5);
      if (circuit.marginal(z) == 0.0) continue;
      try {
        const auto [ep_o, ep_f] = oracle::ep_by_enumeration(circuit, ensemble,
                                                            z);
        const ExpectationResult r =
            expected_logodds(circuit, production_ensemble, z);
        worst = std::max(worst, std::abs(r.expected_logodds - ep_o));
        const double upper = ensemble.upper_bound_log_odds(z);
        const double lower = ensemble.lower_bound_log_odds(z);
        worst_sandwich = std::max(worst_sandwich, ep_o - upper);
        worst_sandwich = std::max(worst_sandwich, lower - ep_o);
      } catch (const BudgetExceeded&) {
        budget_hit = true;
      }
    }
    if (budget_hit) {
      report.skip("expected log-odds matches enumeration", "budget exceeded");
    } else if (worst <= 1e-9) {
      report.pass("expected log-odds matches enumeration");
    } else {
      report.fail("expected log-odds matches enumeration",
                  "max deviation " + fmt(worst));
    }
    if (worst_sandwich <= 1e-9) {
      report.pass("expected log-odds within [L(z), U(z)]");
    } else {
      report.fail("expected log-odds within [L(z), U(z)]",
                  "excess " + fmt(worst_sandwich));
    }
  }

  {
    bool bound_ok = true;
    bool budget_hit = false;
    std::string detail;
    for (int i = 0; i < 20; ++i) {
      Rng rng(derive_seed(config.seed, 5000 + i));
      PartialInstance x(n);
      ConditionalSampler sampler(circuit, PartialInstance(n));
      sampler.sample_into(rng, x);
      PartialInstance z(n);
      for (int v = 0; v < n; ++v) {
        if (rng.coin(0.5)) z.set(v, x.value(v));
      }
      try {
        const double exact = oracle::sdp_by_enumeration(circuit, ensemble, x,
                                                        z);
        const SdpBound bound = sdp_lower_bound(circuit, ensemble, x, z,
                                               BoundVariant::kLogOddsExact);
        if (bound.ep_used == bound.bound_limit) {
          // The evidence pins every tested feature, so the conditional
          // output is a point mass at the limit; strictness is vacuous
          // (bound and SDP are both exactly 1).
          continue;
        }
        if (!(bound.value < exact)) {
          bound_ok = false;
          detail = "bound " + fmt(bound.value) + " !< sdp " + fmt(exact);
        }
      } catch (const BudgetExceeded&) {
        budget_hit = true;
      } catch (const DegenerateBound&) {
        // U(z) == T: the bound is undefined by contract, not a failure.
      }
    }
    if (budget_hit) {
      report.skip("SDP lower bound below exact SDP", "budget exceeded");
    } else if (bound_ok) {
      report.pass("SDP lower bound below exact SDP");
    } else {
      report.fail("SDP lower bound below exact SDP", detail);
    }
  }

  {
    bool budget_hit = false;
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 5; ++i) {
      Rng rng(derive_seed(config.seed, 6000 + i));
      PartialInstance x(n);
      ConditionalSampler sampler(circuit, PartialInstance(n));
      sampler.sample_into(rng, x);
      PartialInstance z(n);
      for (int v = 0; v < n; ++v) {
        if (rng.coin(0.4)) z.set(v, x.value(v));
      }
      try {
        const double exact = oracle::sdp_by_enumeration(circuit, ensemble, x,
                                                        z);
        const SdpEstimate estimate =
            sdp_sample(circuit, ensemble, x, z, 20000,
                       derive_seed(config.seed, 6500 + i), config.threads);
        const double slack = 5.0 * std::max(estimate.std_error, 1e-4);
        if (std::abs(estimate.value - exact) > slack) {
          ok = false;
          detail = "estimate " + fmt(estimate.value) + " vs exact " +
                   fmt(exact);
        }
      } catch (const BudgetExceeded&) {
        budget_hit = true;
      }
    }
    if (budget_hit) {
      report.skip("sampled SDP agrees with exact SDP", "budget exceeded");
    } else if (ok) {
      report.pass("sampled SDP agrees with exact SDP");
    } else {
      report.fail("sampled SDP agrees with exact SDP", detail);
    }
  }

  diag << "# validate " << (report.any_failed ? "FAILED" : "passed") << "\n";
  return report.any_failed ? kValidationFailure : kOk;
}

int cmd_sample(const RunConfig& config, std::ostream& out,
               std::ostream& diag) {
  config.validate();
  Circuit circuit = load_circuit_file(config.circuit_path);
  const int n = circuit.num_features();

  PartialInstance given(n);
  if (!config.given.empty()) {
    std::stringstream stream(config.given);
    std::string item;
    while (std::getline(stream, item, ',')) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) {
        throw InvalidArgument("--given expects name=value pairs");
      }
      std::string name = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      if (!name.empty() && (name[0] == 'X' || name[0] == 'x')) {
        name = name.substr(1);
      }
      int var;
      try {
        var = std::stoi(name);
      } catch (const std::exception&) {
        throw InvalidArgument("--given: cannot parse feature '" + item + "'");
      }
      if (var < 0 || var >= n) {
        throw InvalidArgument("--given: feature index out of range");
      }
      if (value != "0" && value != "1") {
        throw InvalidArgument("--given: value must be 0 or 1");
      }
      given.set(var, value == "1");
    }
  }

  const std::vector<PartialInstance> samples = circuit.sample_conditional(
      given, config.samples, config.seed, config.threads);

  std::ofstream file;
  std::ostream* table = &out;
  if (!config.out_path.empty()) {
    file = open_out_file(config.out_path);
    table = &file;
  }
  for (int i = 0; i < n; ++i) {
    if (i > 0) *table << ",";
    *table << "X" << i;
  }
  *table << "\n";
  for (const PartialInstance& sample : samples) {
    for (int i = 0; i < n; ++i) {
      if (i > 0) *table << ",";
      *table << (sample.value(i) ? 1 : 0);
    }
    *table << "\n";
  }
  diag << "# emitted " << samples.size() << " samples\n";
  return kOk;
}

namespace {

// One node line of a boosted-tree text dump, e.g.
//   0:[f2<0.5] yes=1,no=2,missing=1
//   3:leaf=0.273
struct DumpNode {
  bool is_leaf = false;
  int feature = -1;
  int yes = -1;
  int no = -1;
  double leaf_weight = 0.0;
};

bool parse_dump_line(const std::string& raw, int& id, DumpNode& node) {
  std::string line = raw;
  const std::size_t first = line.find_first_not_of(" \t");
  if (first == std::string::npos) return false;
  line = line.substr(first);
  const std::size_t colon = line.find(':');
  if (colon == std::string::npos) return false;
  try {
    id = std::stoi(line.substr(0, colon));
  } catch (const std::exception&) {
    return false;
  }
  const std::string rest = line.substr(colon + 1);
  if (rest.rfind("leaf=", 0) == 0) {
    node.is_leaf = true;
    node.leaf_weight = std::stod(rest.substr(5));
    return true;
  }
  // [f<feature><<threshold>] yes=A,no=B[,...]
  const std::size_t open = rest.find("[f");
  const std::size_t cmp = rest.find('<', open + 2);
  const std::size_t close = rest.find(']');
  const std::size_t yes_pos = rest.find("yes=");
  const std::size_t no_pos = rest.find("no=");
  if (open == std::string::npos || cmp == std::string::npos ||
      close == std::string::npos || yes_pos == std::string::npos ||
      no_pos == std::string::npos) {
    return false;
  }
  node.is_leaf = false;
  node.feature = std::stoi(rest.substr(open + 2, cmp - open - 2));
  node.yes = std::stoi(rest.substr(yes_pos + 4));
  node.no = std::stoi(rest.substr(no_pos + 3));
  return true;
}

}  // namespace

int cmd_convert(const RunConfig& config, std::ostream& out,
                std::ostream& diag) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (!config.in_path.empty()) {
    file.open(config.in_path);
    if (!file) throw ParseError("cannot open dump file: " + config.in_path);
    in = &file;
  }

  std::vector<std::map<int, DumpNode>> trees;
  std::string line;
  while (std::getline(*in, line)) {
    if (line.find("booster[") != std::string::npos) {
      trees.emplace_back();
      continue;
    }
    int id;
    DumpNode node;
    if (!parse_dump_line(line, id, node)) continue;
    if (trees.empty()) trees.emplace_back();
    trees.back()[id] = node;
  }
  if (trees.empty() || trees.front().empty()) {
    throw ParseError("convert: no tree nodes found in dump");
  }

  int max_feature = -1;
  for (const auto& tree : trees) {
    for (const auto& [id, node] : tree) {
      if (!node.is_leaf) max_feature = std::max(max_feature, node.feature);
    }
  }
  const int n = config.n_override > 0 ? config.n_override : max_feature + 1;
  if (n < 1) {
    throw ParseError("convert: cannot infer feature count from leaf-only "
                     "dump; pass --n");
  }

  json doc{{"n", n},
           {"base_score", config.base_score},
           {"threshold", config.decision_threshold}};
  json tree_list = json::array();
  for (const auto& tree : trees) {
    // Dense ids in ascending original-id order; original id 0 is the root.
    std::map<int, int> remap;
    int next = 0;
    for (const auto& [id, node] : tree) remap[id] = next++;
    json nodes = json::array();
    for (const auto& [id, node] : tree) {
      if (node.is_leaf) {
        nodes.push_back({{"id", remap[id]}, {"leaf_weight", node.leaf_weight}});
      } else {
        if (!remap.count(node.yes) || !remap.count(node.no)) {
          throw ParseError("convert: node references a missing child");
        }
        // Binary 0/1 features against a <0.5 split: value 0 goes yes.
        nodes.push_back({{"id", remap[id]},
                         {"feature", node.feature},
                         {"false_child", remap[node.yes]},
                         {"true_child", remap[node.no]}});
      }
    }
    tree_list.push_back({{"root", 0}, {"nodes", std::move(nodes)}});
  }
  doc["trees"] = std::move(tree_list);

  std::ofstream out_file;
  std::ostream* target = &out;
  if (!config.out_path.empty()) {
    out_file = open_out_file(config.out_path);
    target = &out_file;
  }
  *target << doc.dump(2) << "\n";
  diag << "# converted " << trees.size() << " trees over " << n
       << " features\n";

  // Round-trip through the loader so a malformed conversion fails here, not
  // at first use.
  std::stringstream check(doc.dump());
  load_ensemble(check);
  return kOk;
}

}  // namespace suffx::cli
