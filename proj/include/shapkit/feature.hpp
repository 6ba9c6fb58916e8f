#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shapkit {

using FeatureId = std::uint32_t;

/// A player of the attribution game: a text fragment with a stable id.
struct Feature {
  FeatureId id = 0;
  std::string label;
  std::string content;

  bool operator==(const Feature&) const = default;
};

/// Ordered, non-empty collection of features with unique ids.
///
/// The order is meaningful: sliding-window attribution walks the features in
/// this order, and prompts list feature content in this order.
class FeatureSet {
 public:
  /// Largest set representable by the 64-bit coalition masks used internally.
  static constexpr std::size_t kMaxFeatures = 64;

  explicit FeatureSet(std::vector<Feature> features);

  /// Features labelled by `labels`, with ids 0..n-1 and content = label.
  static FeatureSet from_labels(const std::vector<std::string>& labels);

  std::size_t size() const noexcept { return features_.size(); }
  std::span<const Feature> features() const noexcept { return features_; }
  const Feature& operator[](std::size_t index) const { return features_[index]; }

  /// Position of `id` in the set, if present.
  std::optional<std::size_t> index_of(FeatureId id) const;
  bool contains(FeatureId id) const { return index_of(id).has_value(); }

  /// Ids in set order.
  std::vector<FeatureId> ids() const;

  auto begin() const noexcept { return features_.begin(); }
  auto end() const noexcept { return features_.end(); }

 private:
  std::vector<Feature> features_;
};

}  // namespace shapkit
