// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_DATASET_H_
#define SUFFX_DATASET_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "suffx/instance.h"

namespace suffx {

// Instances parsed from delimited text: a header row of feature names, one
// instance per row with values 0/1. An optional `label` column is carried
// through for report annotation only. Non-label columns map positionally to
// feature indices 0..n-1.
struct InstanceSet {
  std::vector<std::string> feature_names;
  std::vector<PartialInstance> instances;
  std::vector<std::optional<int>> labels;

  std::size_t size() const { return instances.size(); }
};

// expected_features < 0 skips the width check.
InstanceSet load_instances(std::istream& in, int expected_features = -1);
InstanceSet load_instances_file(const std::string& path,
                                int expected_features = -1);

}  // namespace suffx

#endif  // SUFFX_DATASET_H_
