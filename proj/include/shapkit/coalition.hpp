#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "shapkit/feature.hpp"

namespace shapkit {

/// Bitmask over feature positions in a FeatureSet (bit i = i-th feature).
using CoalitionMask = std::uint64_t;

/// Canonical key of a set of feature ids: ascending ids joined by ','.
/// The empty set maps to the empty string, which no non-empty set produces.
std::string canonical_key(std::vector<FeatureId> members);

/// Order-invariant subset of feature ids.
class Coalition {
 public:
  Coalition() = default;
  Coalition(std::initializer_list<FeatureId> members);
  explicit Coalition(std::vector<FeatureId> members);

  /// Coalition of the features whose positions are set in `mask`.
  static Coalition from_mask(const FeatureSet& features, CoalitionMask mask);
  static Coalition all(const FeatureSet& features);

  /// Parses a canonical (or any ','-separated) key. Throws InvalidArgument.
  static Coalition parse_key(std::string_view key);

  /// Sorted, duplicate-free ids.
  const std::vector<FeatureId>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  bool contains(FeatureId id) const;

  const std::string& key() const noexcept { return key_; }

  /// Position mask relative to `features`. Throws InvalidArgument when a
  /// member is not part of the set.
  CoalitionMask to_mask(const FeatureSet& features) const;

  bool operator==(const Coalition& other) const { return members_ == other.members_; }

 private:
  std::vector<FeatureId> members_;
  std::string key_;
};

}  // namespace shapkit
