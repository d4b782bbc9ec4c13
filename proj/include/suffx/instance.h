// Copyright the suffx authors. Licensed under the terms of the Apache 2.0
// license. See LICENSE in the project root.
#ifndef SUFFX_INSTANCE_H_
#define SUFFX_INSTANCE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace suffx {

// Assignment to a subset of the n binary features. Densely stored; each
// variable is unassigned, false, or true. A full instance assigns all n.
class PartialInstance {
 public:
  explicit PartialInstance(int num_features);

  // Full instance from a 0/1 vector.
  static PartialInstance from_bits(const std::vector<std::uint8_t>& bits);

  int num_features() const { return static_cast<int>(values_.size()); }
  int assigned_count() const { return assigned_; }
  bool empty() const { return assigned_ == 0; }
  bool full() const { return assigned_ == num_features(); }

  bool has(int var) const { return values_[var] >= 0; }
  bool value(int var) const { return values_[var] == 1; }

  // -1 unassigned, 0 false, 1 true. Hot path for circuit evaluation.
  std::int8_t raw(int var) const { return values_[var]; }

  // Setting an assigned variable to the same value is a no-op; to a
  // different value, an error (a feature appears at most once).
  void set(int var, bool value);
  void unset(int var);

  // No variable assigned by both with different values.
  bool consistent_with(const PartialInstance& other) const;

  // Every assignment of *this also appears in other.
  bool subset_of(const PartialInstance& other) const;

  // Union of the two assignments; throws InconsistentEvidence on conflict.
  PartialInstance merged(const PartialInstance& other) const;

  std::vector<int> assigned_indices() const;

  // One char per variable: '.', '0', or '1'. Used as cache/dedup key.
  std::string canonical_key() const;

  bool operator==(const PartialInstance& other) const = default;

 private:
  std::vector<std::int8_t> values_;
  int assigned_ = 0;
};

}  // namespace suffx

#endif  // SUFFX_INSTANCE_H_
