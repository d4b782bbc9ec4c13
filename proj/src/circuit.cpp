// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/circuit.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "suffx/errors.h"
#include "suffx/threading.h"

namespace suffx {

namespace {

constexpr double kUnderflowGuard = 1e-300;
constexpr double kWeightTolerance = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Variable scope as a packed bitset; only needed during validation.
class VarSet {
 public:
  explicit VarSet(int n) : blocks_((n + 63) / 64, 0) {}

  void add(int var) { blocks_[var >> 6] |= 1ULL << (var & 63); }

  void merge(const VarSet& other) {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      blocks_[i] |= other.blocks_[i];
    }
  }

  bool intersects(const VarSet& other) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i] & other.blocks_[i]) return true;
    }
    return false;
  }

  bool operator==(const VarSet& other) const = default;

  bool covers(int n) const {
    int count = 0;
    for (std::uint64_t b : blocks_) count += __builtin_popcountll(b);
    return count == n;
  }

 private:
  std::vector<std::uint64_t> blocks_;
};

std::string node_tag(int id) { return "node " + std::to_string(id); }

// Scratch buffers for the evaluation passes. Circuits are immutable, so
// concurrent evaluation only needs per-thread storage.
thread_local std::vector<double> tls_values;
thread_local std::vector<double> tls_log_values;

}  // namespace

Circuit::Circuit(std::vector<CircuitNode> nodes, int root, int num_features)
    : nodes_(std::move(nodes)), root_(root), num_features_(num_features) {
  if (num_features_ <= 0) {
    throw InvariantViolation("circuit must have at least one feature");
  }
  if (nodes_.empty()) throw InvariantViolation("circuit has no nodes");
  if (root_ < 0 || root_ >= static_cast<int>(nodes_.size())) {
    throw InvariantViolation("root id out of range");
  }

  std::vector<VarSet> scopes;
  scopes.reserve(nodes_.size());
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) {
    CircuitNode& node = nodes_[id];
    VarSet scope(num_features_);
    switch (node.kind) {
      case NodeKind::kLiteral: {
        if (node.var < 0 || node.var >= num_features_) {
          throw InvariantViolation(node_tag(id) + ": variable index " +
                                   std::to_string(node.var) +
                                   " out of range [0, " +
                                   std::to_string(num_features_) + ")");
        }
        scope.add(node.var);
        break;
      }
      case NodeKind::kSum: {
        if (node.children.empty()) {
          throw InvariantViolation(node_tag(id) + ": sum node has no children");
        }
        if (node.children.size() != node.weights.size()) {
          throw InvariantViolation(node_tag(id) +
                                   ": children/weights length mismatch");
        }
        double total = 0.0;
        for (std::size_t j = 0; j < node.children.size(); ++j) {
          const int child = node.children[j];
          if (child < 0 || child >= id) {
            throw InvariantViolation(node_tag(id) +
                                     ": child id must precede parent "
                                     "(topological order violated)");
          }
          if (!(node.weights[j] > 0.0)) {
            throw InvariantViolation(node_tag(id) +
                                     ": sum weights must be strictly positive");
          }
          total += node.weights[j];
          if (j == 0) {
            scope = scopes[child];
          } else if (!(scopes[child] == scopes[node.children[0]])) {
            throw InvariantViolation(node_tag(id) +
                                     ": smoothness violated (children mention "
                                     "different variable sets)");
          }
        }
        if (std::abs(total - 1.0) > kWeightTolerance) {
          throw InvariantViolation(node_tag(id) +
                                   ": sum weights normalize to " +
                                   std::to_string(total) + ", expected 1");
        }
        for (double& w : node.weights) w /= total;
        break;
      }
      case NodeKind::kProduct: {
        if (node.children.empty()) {
          throw InvariantViolation(node_tag(id) +
                                   ": product node has no children");
        }
        for (const int child : node.children) {
          if (child < 0 || child >= id) {
            throw InvariantViolation(node_tag(id) +
                                     ": child id must precede parent "
                                     "(topological order violated)");
          }
          if (scope.intersects(scopes[child])) {
            throw InvariantViolation(node_tag(id) +
                                     ": decomposability violated (children "
                                     "share variables)");
          }
          scope.merge(scopes[child]);
        }
        break;
      }
    }
    scopes.push_back(std::move(scope));
  }

  // The root must range over every variable, otherwise the circuit does not
  // define a distribution over all n features (the law of total probability
  // would fail for unmentioned variables).
  if (!scopes[root_].covers(num_features_)) {
    throw InvariantViolation("root scope does not cover all " +
                             std::to_string(num_features_) + " variables");
  }
}

double Circuit::marginal(const PartialInstance& evidence) const {
  if (evidence.num_features() != num_features_) {
    throw DimensionMismatch("evidence has " +
                            std::to_string(evidence.num_features()) +
                            " features, circuit has " +
                            std::to_string(num_features_));
  }
  std::vector<double>& values = tls_values;
  values.resize(nodes_.size());
  bool underflow = false;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const CircuitNode& node = nodes_[id];
    double v = 0.0;
    switch (node.kind) {
      case NodeKind::kLiteral: {
        const std::int8_t a = evidence.raw(node.var);
        v = (a < 0 || (a == 1) == node.polarity) ? 1.0 : 0.0;
        break;
      }
      case NodeKind::kSum: {
        double s = 0.0;
        bool saw_positive = false;
        for (std::size_t j = 0; j < node.children.size(); ++j) {
          const double c = values[node.children[j]];
          saw_positive |= c > 0.0;
          s += node.weights[j] * c;
        }
        if (s == 0.0 && saw_positive) underflow = true;
        v = s;
        break;
      }
      case NodeKind::kProduct: {
        double p = 1.0;
        bool saw_zero = false;
        for (const int child : node.children) {
          const double c = values[child];
          saw_zero |= c == 0.0;
          p *= c;
        }
        if (p == 0.0 && !saw_zero) underflow = true;
        v = p;
        break;
      }
    }
    if (v != 0.0 && v < kUnderflowGuard) underflow = true;
    values[id] = v;
  }
  if (underflow) return std::exp(log_marginal(evidence));
  return values[root_];
}

double Circuit::log_marginal(const PartialInstance& evidence) const {
  if (evidence.num_features() != num_features_) {
    throw DimensionMismatch("evidence feature count mismatch");
  }
  std::vector<double>& lv = tls_log_values;
  lv.resize(nodes_.size());
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const CircuitNode& node = nodes_[id];
    switch (node.kind) {
      case NodeKind::kLiteral: {
        const std::int8_t a = evidence.raw(node.var);
        lv[id] = (a < 0 || (a == 1) == node.polarity) ? 0.0 : kNegInf;
        break;
      }
      case NodeKind::kSum: {
        double max_term = kNegInf;
        for (std::size_t j = 0; j < node.children.size(); ++j) {
          const double term = std::log(node.weights[j]) + lv[node.children[j]];
          max_term = std::max(max_term, term);
        }
        if (max_term == kNegInf) {
          lv[id] = kNegInf;
          break;
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < node.children.size(); ++j) {
          acc += std::exp(std::log(node.weights[j]) + lv[node.children[j]] -
                          max_term);
        }
        lv[id] = max_term + std::log(acc);
        break;
      }
      case NodeKind::kProduct: {
        double acc = 0.0;
        for (const int child : node.children) acc += lv[child];
        lv[id] = acc;
        break;
      }
    }
  }
  return lv[root_];
}

double Circuit::conditional(const PartialInstance& query,
                            const PartialInstance& given) const {
  if (!query.consistent_with(given)) {
    throw InconsistentEvidence("query conflicts with given evidence");
  }
  const double pg = marginal(given);
  if (pg == 0.0) throw ZeroEvidence("conditioning evidence has probability 0");
  return marginal(query.merged(given)) / pg;
}

ConditionalSampler::ConditionalSampler(const Circuit& circuit,
                                       PartialInstance given)
    : circuit_(circuit),
      given_(std::move(given)),
      log_marginals_(circuit.node_count()),
      evidence_log_marginal_(kNegInf) {
  if (given_.num_features() != circuit_.num_features()) {
    throw DimensionMismatch("evidence feature count mismatch");
  }
  for (std::size_t id = 0; id < circuit_.node_count(); ++id) {
    const CircuitNode& node = circuit_.node(static_cast<int>(id));
    switch (node.kind) {
      case NodeKind::kLiteral: {
        const std::int8_t a = given_.raw(node.var);
        log_marginals_[id] =
            (a < 0 || (a == 1) == node.polarity) ? 0.0 : kNegInf;
        break;
      }
      case NodeKind::kSum: {
        double max_term = kNegInf;
        for (std::size_t j = 0; j < node.children.size(); ++j) {
          max_term = std::max(max_term, std::log(node.weights[j]) +
                                            log_marginals_[node.children[j]]);
        }
        if (max_term == kNegInf) {
          log_marginals_[id] = kNegInf;
          break;
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < node.children.size(); ++j) {
          acc += std::exp(std::log(node.weights[j]) +
                          log_marginals_[node.children[j]] - max_term);
        }
        log_marginals_[id] = max_term + std::log(acc);
        break;
      }
      case NodeKind::kProduct: {
        double acc = 0.0;
        for (const int child : node.children) acc += log_marginals_[child];
        log_marginals_[id] = acc;
        break;
      }
    }
  }
  evidence_log_marginal_ = log_marginals_[circuit_.root()];
  if (evidence_log_marginal_ == kNegInf) {
    throw ZeroEvidence("cannot sample: evidence has probability 0");
  }
}

void ConditionalSampler::sample_into(Rng& rng, PartialInstance& out) const {
  out = given_;
  // Explicit stack; children pushed in reverse so they are visited left to
  // right, keeping the per-sum draw order stable.
  thread_local std::vector<int> stack;
  stack.clear();
  stack.push_back(circuit_.root());
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const CircuitNode& node = circuit_.node(id);
    switch (node.kind) {
      case NodeKind::kLiteral: {
        if (!out.has(node.var)) out.set(node.var, node.polarity);
        break;
      }
      case NodeKind::kSum: {
        const double u = rng.uniform();
        const double node_log = log_marginals_[id];
        double cumulative = 0.0;
        int chosen = -1;
        int last_positive = -1;
        for (std::size_t j = 0; j < node.children.size(); ++j) {
          const double child_log = log_marginals_[node.children[j]];
          if (child_log == kNegInf) continue;
          const double p =
              std::exp(std::log(node.weights[j]) + child_log - node_log);
          last_positive = node.children[j];
          cumulative += p;
          if (u < cumulative) {
            chosen = node.children[j];
            break;
          }
        }
        // Cumulative may fall a rounding error short of 1.
        if (chosen < 0) chosen = last_positive;
        if (chosen < 0) {
          throw ZeroEvidence("descended into a zero-probability sum node");
        }
        stack.push_back(chosen);
        break;
      }
      case NodeKind::kProduct: {
        for (auto it = node.children.rbegin(); it != node.children.rend();
             ++it) {
          stack.push_back(*it);
        }
        break;
      }
    }
  }
}

std::vector<PartialInstance> Circuit::sample_conditional(
    const PartialInstance& given, long count, std::uint64_t seed,
    int threads) const {
  if (count < 0) throw InvalidArgument("sample count must be non-negative");
  ConditionalSampler sampler(*this, given);
  std::vector<PartialInstance> out(count, PartialInstance(num_features_));
  // Fixed-size chunks with per-chunk derived seeds; thread count only
  // affects which worker fills a chunk, never the content.
  constexpr long kChunk = 4096;
  const std::size_t num_chunks = (count + kChunk - 1) / kChunk;
  parallel_for(num_chunks, threads, [&](std::size_t chunk, int) {
    Rng rng(derive_seed(seed, chunk));
    const long begin = static_cast<long>(chunk) * kChunk;
    const long end = std::min(count, begin + kChunk);
    for (long i = begin; i < end; ++i) {
      sampler.sample_into(rng, out[i]);
    }
  });
  return out;
}

namespace {

using nlohmann::json;

bool parse_polarity(const json& value, int id) {
  if (value.is_boolean()) return value.get<bool>();
  if (value.is_number_integer()) {
    const int v = value.get<int>();
    if (v == 0 || v == 1) return v == 1;
  }
  throw ParseError(node_tag(id) + ": literal value must be a boolean or 0/1");
}

}  // namespace

Circuit load_circuit(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("circuit: invalid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("root") ||
        !doc.contains("nodes")) {
      throw ParseError("circuit: expected object with n, root, nodes");
    }
    const int n = doc.at("n").get<int>();
    const int root = doc.at("root").get<int>();
    const json& node_list = doc.at("nodes");
    if (!node_list.is_array()) throw ParseError("circuit: nodes must be an array");

    std::vector<CircuitNode> nodes;
    nodes.reserve(node_list.size());
    int expected_id = 0;
    for (const json& entry : node_list) {
      const int id = entry.at("id").get<int>();
      if (id != expected_id) {
        throw ParseError(node_tag(id) + ": ids must be dense and in order");
      }
      ++expected_id;
      const std::string kind = entry.at("kind").get<std::string>();
      CircuitNode node;
      if (kind == "lit") {
        node.kind = NodeKind::kLiteral;
        node.var = entry.at("var").get<int>();
        node.polarity = parse_polarity(entry.at("value"), id);
      } else if (kind == "sum") {
        node.kind = NodeKind::kSum;
        node.children = entry.at("children").get<std::vector<int>>();
        node.weights = entry.at("weights").get<std::vector<double>>();
      } else if (kind == "prod") {
        node.kind = NodeKind::kProduct;
        node.children = entry.at("children").get<std::vector<int>>();
      } else {
        throw ParseError(node_tag(id) + ": unknown kind '" + kind + "'");
      }
      nodes.push_back(std::move(node));
    }
    return Circuit(std::move(nodes), root, n);
  } catch (const json::exception& e) {
    throw ParseError(std::string("circuit: ") + e.what());
  }
}

Circuit load_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open circuit file: " + path);
  return load_circuit(in);
}

}  // namespace suffx
