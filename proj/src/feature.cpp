#include "shapkit/feature.hpp"

#include <unordered_set>

#include "shapkit/error.hpp"

namespace shapkit {

FeatureSet::FeatureSet(std::vector<Feature> features) : features_(std::move(features)) {
  if (features_.empty()) throw InvalidArgument("a feature set needs at least one feature");
  if (features_.size() > kMaxFeatures) {
    throw InvalidArgument("a feature set holds at most " + std::to_string(kMaxFeatures) +
                          " features");
  }
  std::unordered_set<FeatureId> seen;
  for (const auto& f : features_) {
    if (!seen.insert(f.id).second) {
      throw InvalidArgument("duplicate feature id " + std::to_string(f.id));
    }
    if (f.label.empty()) {
      throw InvalidArgument("feature " + std::to_string(f.id) + " has an empty label");
    }
  }
}

FeatureSet FeatureSet::from_labels(const std::vector<std::string>& labels) {
  std::vector<Feature> features;
  features.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    features.push_back({static_cast<FeatureId>(i), labels[i], labels[i]});
  }
  return FeatureSet(std::move(features));
}

std::optional<std::size_t> FeatureSet::index_of(FeatureId id) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<FeatureId> FeatureSet::ids() const {
  std::vector<FeatureId> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.id);
  return out;
}

}  // namespace shapkit
