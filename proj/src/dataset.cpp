// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/dataset.h"

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "suffx/errors.h"

namespace suffx {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

InstanceSet load_instances(std::istream& in, int expected_features) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("instances: empty input, expected a header row");
  }
  InstanceSet set;
  int label_column = -1;
  const std::vector<std::string> header = split_row(line);
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name == "label") {
      if (label_column >= 0) {
        throw ParseError("instances: duplicate label column");
      }
      label_column = static_cast<int>(i);
    } else {
      if (name.empty()) {
        throw ParseError("instances: empty feature name in header");
      }
      set.feature_names.push_back(name);
    }
  }
  const int n = static_cast<int>(set.feature_names.size());
  if (n == 0) throw ParseError("instances: no feature columns");
  if (expected_features >= 0 && n != expected_features) {
    throw DimensionMismatch("instances have " + std::to_string(n) +
                            " features, models expect " +
                            std::to_string(expected_features));
  }

  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_row(line);
    if (cells.size() != header.size()) {
      throw ParseError("instances row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    }
    PartialInstance instance(n);
    std::optional<int> label;
    int feature = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string value = trim(cells[i]);
      if (static_cast<int>(i) == label_column) {
        if (value == "0") {
          label = 0;
        } else if (value == "1") {
          label = 1;
        } else if (!value.empty()) {
          throw ParseError("instances row " + std::to_string(row) +
                           ": label must be 0 or 1");
        }
        continue;
      }
      if (value == "0") {
        instance.set(feature, false);
      } else if (value == "1") {
        instance.set(feature, true);
      } else {
        throw ParseError("instances row " + std::to_string(row) + " column '" +
                         trim(header[i]) + "': expected 0 or 1, got '" +
                         value + "'");
      }
      ++feature;
    }
    set.instances.push_back(std::move(instance));
    set.labels.push_back(label);
  }
  return set;
}

InstanceSet load_instances_file(const std::string& path,
                                int expected_features) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instances file: " + path);
  return load_instances(in, expected_features);
}

}  // namespace suffx
