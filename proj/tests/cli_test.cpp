// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/cli.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "suffx/circuit.h"
#include "suffx/dataset.h"
#include "suffx/ensemble.h"
#include "suffx/errors.h"
#include "suffx/expectation.h"
#include "support/generators.h"

using namespace suffx;
using suffx::cli::RunConfig;

namespace {

std::string fixture(const std::string& name) {
  return std::string(SUFFX_FIXTURE_DIR) + "/" + name;
}

RunConfig demo_config() {
  RunConfig config;
  config.circuit_path = fixture("demo_circuit.json");
  config.ensemble_path = fixture("demo_ensemble.json");
  config.instances_path = fixture("demo_instances.csv");
  config.k = 3;
  config.beam_width = 8;
  config.samples = 2000;
  config.seed = 17;
  return config;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("instance loader handles labels and rejects malformed rows") {
  std::stringstream good("X0,X1,label\n0,1,1\n1,0,0\n");
  const InstanceSet set = load_instances(good, 2);
  REQUIRE(set.size() == 2);
  CHECK(set.feature_names == std::vector<std::string>{"X0", "X1"});
  CHECK(set.instances[0].value(1));
  CHECK(*set.labels[0] == 1);

  std::stringstream bad_value("X0,X1\n0,2\n");
  CHECK_THROWS_AS(load_instances(bad_value, 2), ParseError);
  std::stringstream short_row("X0,X1\n0\n");
  CHECK_THROWS_AS(load_instances(short_row, 2), ParseError);
  std::stringstream wrong_width("X0,X1,X2\n0,1,0\n");
  CHECK_THROWS_AS(load_instances(wrong_width, 2), DimensionMismatch);
}

TEST_CASE("explain emits a row per size plus the tracked optimum") {
  RunConfig config = demo_config();
  const std::string dir = testing::make_temp_dir("explain");
  config.out_path = dir + "/report.jsonl";
  std::ostringstream out, diag;
  CHECK(cli::cmd_explain(config, out, diag) == cli::kOk);

  const std::string text = out.str();
  CHECK(text.find("instance 0") != std::string::npos);
  CHECK(text.find("MLSE") != std::string::npos);

  std::ifstream machine(config.out_path);
  std::string line;
  int records = 0;
  while (std::getline(machine, line)) {
    const auto record = nlohmann::json::parse(line);
    ++records;
    CHECK(record.contains("mlse"));
    CHECK(record.at("levels").size() == 3);
    CHECK(record.at("counters").at("ep_evaluations").get<long>() > 0);
    for (const auto& level : record.at("levels")) {
      CHECK(level.at("log_pr").get<double>() <= 0.0);
      CHECK(std::isfinite(level.at("ep_logodds").get<double>()));
      CHECK(level.at("sdp").get<double>() >= 0.0);
      CHECK(level.at("bound_logodds_clamped").get<double>() >= 0.0);
      // Bound validity surfaced in the report: clamped bound below the
      // sampled SDP estimate plus sampling noise.
      CHECK(level.at("bound_logodds_clamped").get<double>() <=
            level.at("sdp").get<double>() + 0.05);
    }
  }
  CHECK(records == 6);
}

TEST_CASE("explain report numbers round-trip through the JSON output") {
  RunConfig config = demo_config();
  const std::string dir = testing::make_temp_dir("roundtrip");
  config.out_path = dir + "/report.jsonl";
  std::ostringstream out, diag;
  REQUIRE(cli::cmd_explain(config, out, diag) == cli::kOk);

  const Circuit circuit = load_circuit_file(config.circuit_path);
  const Ensemble ensemble = load_ensemble_file(config.ensemble_path);
  std::ifstream machine(config.out_path);
  std::string line;
  while (std::getline(machine, line)) {
    const auto record = nlohmann::json::parse(line);
    const auto& mlse = record.at("mlse");
    PartialInstance z(circuit.num_features());
    for (const auto& item : mlse.at("subset")) {
      z.set(item.at("index").get<int>(), item.at("value").get<int>() == 1);
    }
    const ExpectationResult r = expected_logodds(circuit, ensemble, z);
    CHECK(mlse.at("ep_logodds").get<double>() == r.expected_logodds);
    CHECK(mlse.at("pr").get<double>() == r.evidence_marginal);
  }
}

TEST_CASE("explain with a target expectation returns one explanation") {
  RunConfig config = demo_config();
  config.ep_min = 0.1;
  std::ostringstream out, diag;
  CHECK(cli::cmd_explain(config, out, diag) == cli::kOk);
  CHECK(out.str().find("instance 0") != std::string::npos);

  config.ep_min = 1e9;  // unreachable for every instance
  std::ostringstream out2, diag2;
  CHECK(cli::cmd_explain(config, out2, diag2) == cli::kOk);
  CHECK(out2.str().find("unreachable") != std::string::npos);
}

TEST_CASE("sweep table header is bit-exact and bounds stay below the SDP") {
  RunConfig config = demo_config();
  config.k = 8;
  std::ostringstream out, diag;
  CHECK(cli::cmd_sweep(config, out, diag) == cli::kOk);
  const std::vector<std::string> lines = lines_of(out.str());
  REQUIRE(!lines.empty());
  CHECK(lines[0] ==
        "size,sdp_mean,sdp_sd,bound_logodds_mean,bound_logodds_sd,"
        "bound_approx_mean,bound_approx_sd");
  REQUIRE(lines.size() == 9);  // header + sizes 1..8
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> cells = split_csv(lines[i]);
    REQUIRE(cells.size() == 7);
    const double sdp_mean = std::stod(cells[1]);
    const double bound_mean = std::stod(cells[3]);
    CHECK(bound_mean <= sdp_mean + 1e-12);
  }
  // At size n the explanation is the full instance: SDP exactly 1, sd 0.
  const std::vector<std::string> last = split_csv(lines.back());
  CHECK(last[0] == "8");
  CHECK(std::stod(last[1]) == 1.0);
  CHECK(std::stod(last[2]) == 0.0);
  // The mean SDP trends upward as explanations grow.
  const std::vector<std::string> first_row = split_csv(lines[1]);
  CHECK(std::stod(last[1]) >= std::stod(first_row[1]));
}

TEST_CASE("tradeoff emits one point per instance and size") {
  RunConfig config = demo_config();
  config.k = 8;
  std::ostringstream out, diag;
  CHECK(cli::cmd_tradeoff(config, out, diag) == cli::kOk);
  const std::vector<std::string> lines = lines_of(out.str());
  REQUIRE(!lines.empty());
  CHECK(lines[0] == "instance,class,size,approx_ep,log_pr");
  CHECK(lines.size() == 1 + 6 * 8);

  const Circuit circuit = load_circuit_file(config.circuit_path);
  const Ensemble ensemble = load_ensemble_file(config.ensemble_path);
  const InstanceSet set = load_instances_file(config.instances_path, 8);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> cells = split_csv(lines[i]);
    REQUIRE(cells.size() == 5);
    const int instance = std::stoi(cells[0]);
    const int size = std::stoi(cells[2]);
    if (size == 8) {
      // The level-n point is the full instance: sigmoid of its raw output.
      const double expected =
          sigmoid(ensemble.log_odds(set.instances[instance]));
      CHECK(std::stod(cells[3]) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(std::stod(cells[4]) <= 0.0);
  }
}

TEST_CASE("logical command reports sizes and summary fractions") {
  RunConfig config = demo_config();
  std::ostringstream out, diag;
  CHECK(cli::cmd_logical(config, out, diag) == cli::kOk);
  const std::vector<std::string> lines = lines_of(out.str());
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] ==
        "instance,class,logical_worst_size,logical_dist_size,"
        "mlse_sdp95_size,num_features");
  int summary_lines = 0;
  for (const std::string& line : lines) {
    if (line.rfind("# mean_", 0) == 0) ++summary_lines;
  }
  CHECK(summary_lines == 3);
  const std::vector<std::string> first = split_csv(lines[1]);
  REQUIRE(first.size() == 6);
  CHECK(std::stoi(first[2]) >= std::stoi(first[3]));  // worst >= aware
}

TEST_CASE("validate passes on the demo fixtures and exposes injected faults") {
  RunConfig config = demo_config();
  config.instances_path.clear();
  std::ostringstream out, diag;
  CHECK(cli::cmd_validate(config, out, diag) == cli::kOk);
  CHECK(out.str().find("[FAIL]") == std::string::npos);

  RunConfig skew = config;
  skew.inject = "marginal-skew";
  std::ostringstream out2, diag2;
  CHECK(cli::cmd_validate(skew, out2, diag2) == cli::kValidationFailure);
  CHECK(out2.str().find("[FAIL] marginal matches joint-table enumeration") !=
        std::string::npos);

  RunConfig drop = config;
  drop.inject = "ep-drop-leaf";
  std::ostringstream out3, diag3;
  CHECK(cli::cmd_validate(drop, out3, diag3) == cli::kValidationFailure);
  CHECK(out3.str().find("[FAIL] expected log-odds matches enumeration") !=
        std::string::npos);
}

TEST_CASE("sample emits deterministic rows extending the evidence") {
  RunConfig config;
  config.circuit_path = fixture("demo_circuit.json");
  config.samples = 500;
  config.seed = 3;
  config.given = "X3=1,X0=0";
  std::ostringstream out, diag;
  CHECK(cli::cmd_sample(config, out, diag) == cli::kOk);
  const std::vector<std::string> lines = lines_of(out.str());
  REQUIRE(lines.size() == 501);
  CHECK(lines[0] == "X0,X1,X2,X3,X4,X5,X6,X7");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> cells = split_csv(lines[i]);
    REQUIRE(cells.size() == 8);
    CHECK(cells[0] == "0");
    CHECK(cells[3] == "1");
  }
  std::ostringstream out2, diag2;
  CHECK(cli::cmd_sample(config, out2, diag2) == cli::kOk);
  CHECK(out.str() == out2.str());
}

TEST_CASE("convert turns a booster text dump into a loadable ensemble") {
  const std::string dump =
      "booster[0]:\n"
      "0:[f2<0.5] yes=1,no=2,missing=1\n"
      "\t1:leaf=0.4\n"
      "\t2:leaf=-0.3\n"
      "booster[1]:\n"
      "0:[f0<0.5] yes=1,no=2\n"
      "\t1:[f1<0.5] yes=3,no=4,missing=3\n"
      "\t2:leaf=0.25\n"
      "\t3:leaf=-0.1\n"
      "\t4:leaf=0.6\n";
  const std::string dir = testing::make_temp_dir("convert");
  RunConfig config;
  config.in_path = testing::write_file(dir, "dump.txt", dump);
  config.out_path = dir + "/ensemble.json";
  std::ostringstream out, diag;
  CHECK(cli::cmd_convert(config, out, diag) == cli::kOk);

  const Ensemble e = load_ensemble_file(config.out_path);
  CHECK(e.num_features() == 3);
  CHECK(e.tree_count() == 2);
  // x = (0,0,0): tree0 takes f2<0.5 -> yes -> 0.4; tree1 f0 yes, f1 yes -> -0.1.
  CHECK(e.log_odds(PartialInstance::from_bits({0, 0, 0})) ==
        doctest::Approx(0.4 - 0.1));
  // x = (1,1,1): tree0 no -> -0.3; tree1 f0 no -> 0.25.
  CHECK(e.log_odds(PartialInstance::from_bits({1, 1, 1})) ==
        doctest::Approx(-0.3 + 0.25));
}

TEST_CASE("missing inputs surface as parse errors") {
  RunConfig config = demo_config();
  config.circuit_path = "/nonexistent/circuit.json";
  std::ostringstream out, diag;
  CHECK_THROWS_AS(cli::cmd_explain(config, out, diag), ParseError);
}

TEST_CASE("the binary maps error classes onto the documented exit codes") {
  const std::string dir = testing::make_temp_dir("exitcodes");
  const auto run = [&](const std::string& args) {
    const std::string command = std::string(SUFFX_CLI_PATH) + " " + args +
                                " > /dev/null 2> /dev/null";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
  };
  const std::string models = " --circuit " + fixture("demo_circuit.json") +
                             " --ensemble " + fixture("demo_ensemble.json");
  const std::string inputs =
      models + " --instances " + fixture("demo_instances.csv");

  // 0: success.
  CHECK(run("explain" + inputs + " --k 2 --samples 200") == 0);
  // 1: usage/config errors.
  CHECK(run("explain" + inputs + " --k 0") == 1);
  CHECK(run("nonsense") == 1);
  // 2: unreadable or malformed inputs.
  CHECK(run("explain --circuit /no/such/file.json --ensemble " +
            fixture("demo_ensemble.json") + " --instances " +
            fixture("demo_instances.csv")) == 2);
  const std::string garbled = testing::write_file(dir, "bad.json", "{oops");
  CHECK(run("explain --circuit " + garbled + " --ensemble " +
            fixture("demo_ensemble.json") + " --instances " +
            fixture("demo_instances.csv")) == 2);
  // 3: validation failure.
  CHECK(run("validate" + models + " --inject marginal-skew") == 3);
  // 4: enumeration budget exceeded (logical brute force needs n <= 14).
  {
    testing::CircuitGenConfig config;
    config.n = 16;
    const Circuit wide = testing::random_circuit(5, config);
    const Ensemble forest = testing::random_forest(6, 16, 2, 2);
    const PartialInstance x = testing::sample_instance(wide, 7);
    const std::string circuit_path =
        testing::write_file(dir, "wide_circuit.json",
                            testing::circuit_to_json(wide));
    const std::string ensemble_path = testing::write_file(
        dir, "wide_ensemble.json", testing::ensemble_to_json(forest));
    const std::string instances_path = testing::write_file(
        dir, "wide_instances.csv", testing::instances_to_csv({x}));
    CHECK(run("logical --circuit " + circuit_path + " --ensemble " +
              ensemble_path + " --instances " + instances_path) == 4);
  }
}

TEST_CASE("config invariants are enforced") {
  RunConfig config = demo_config();
  config.k = 0;
  CHECK_THROWS_AS(config.validate(), InvalidArgument);
  config = demo_config();
  config.samples = 0;
  CHECK_THROWS_AS(config.validate(), InvalidArgument);
  config = demo_config();
  config.threads = 0;
  CHECK_THROWS_AS(config.validate(), InvalidArgument);
}

}  // TEST_SUITE
