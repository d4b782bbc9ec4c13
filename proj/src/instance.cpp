// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#include "suffx/instance.h"

#include <string>

#include "suffx/errors.h"

namespace suffx {

PartialInstance::PartialInstance(int num_features)
    : values_(num_features < 0 ? 0 : num_features, -1) {
  if (num_features < 0) {
    throw InvalidArgument("feature count must be non-negative");
  }
}

PartialInstance PartialInstance::from_bits(
    const std::vector<std::uint8_t>& bits) {
  PartialInstance out(static_cast<int>(bits.size()));
  for (int i = 0; i < out.num_features(); ++i) {
    out.set(i, bits[i] != 0);
  }
  return out;
}

void PartialInstance::set(int var, bool value) {
  if (var < 0 || var >= num_features()) {
    throw InvalidArgument("feature index " + std::to_string(var) +
                          " out of range [0, " +
                          std::to_string(num_features()) + ")");
  }
  const std::int8_t wanted = value ? 1 : 0;
  if (values_[var] == wanted) return;
  if (values_[var] >= 0) {
    throw InconsistentEvidence("feature " + std::to_string(var) +
                               " assigned twice with conflicting values");
  }
  values_[var] = wanted;
  ++assigned_;
}

void PartialInstance::unset(int var) {
  if (var < 0 || var >= num_features()) {
    throw InvalidArgument("feature index out of range");
  }
  if (values_[var] >= 0) {
    values_[var] = -1;
    --assigned_;
  }
}

bool PartialInstance::consistent_with(const PartialInstance& other) const {
  const int n = num_features();
  if (n != other.num_features()) return false;
  for (int i = 0; i < n; ++i) {
    if (values_[i] >= 0 && other.values_[i] >= 0 &&
        values_[i] != other.values_[i]) {
      return false;
    }
  }
  return true;
}

bool PartialInstance::subset_of(const PartialInstance& other) const {
  const int n = num_features();
  if (n != other.num_features()) return false;
  for (int i = 0; i < n; ++i) {
    if (values_[i] >= 0 && other.values_[i] != values_[i]) return false;
  }
  return true;
}

PartialInstance PartialInstance::merged(const PartialInstance& other) const {
  if (num_features() != other.num_features()) {
    throw DimensionMismatch("cannot merge assignments over different n");
  }
  PartialInstance out = *this;
  for (int i = 0; i < num_features(); ++i) {
    if (other.values_[i] >= 0) out.set(i, other.values_[i] == 1);
  }
  return out;
}

std::vector<int> PartialInstance::assigned_indices() const {
  std::vector<int> out;
  out.reserve(assigned_);
  for (int i = 0; i < num_features(); ++i) {
    if (values_[i] >= 0) out.push_back(i);
  }
  return out;
}

std::string PartialInstance::canonical_key() const {
  std::string key(values_.size(), '.');
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0) key[i] = '0';
    if (values_[i] == 1) key[i] = '1';
  }
  return key;
}

}  // namespace suffx
