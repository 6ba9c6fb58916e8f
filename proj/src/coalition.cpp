#include "shapkit/coalition.hpp"

#include <algorithm>
#include <charconv>

#include "shapkit/error.hpp"

namespace shapkit {

namespace {

void normalize(std::vector<FeatureId>& members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
}

std::string join_sorted(const std::vector<FeatureId>& sorted) {
  std::string key;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i != 0) key.push_back(',');
    key += std::to_string(sorted[i]);
  }
  return key;
}

}  // namespace

std::string canonical_key(std::vector<FeatureId> members) {
  normalize(members);
  return join_sorted(members);
}

Coalition::Coalition(std::initializer_list<FeatureId> members)
    : Coalition(std::vector<FeatureId>(members)) {}

Coalition::Coalition(std::vector<FeatureId> members) : members_(std::move(members)) {
  normalize(members_);
  key_ = join_sorted(members_);
}

Coalition Coalition::from_mask(const FeatureSet& features, CoalitionMask mask) {
  std::vector<FeatureId> ids;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (mask & (CoalitionMask{1} << i)) ids.push_back(features[i].id);
  }
  return Coalition(std::move(ids));
}

Coalition Coalition::all(const FeatureSet& features) { return Coalition(features.ids()); }

Coalition Coalition::parse_key(std::string_view key) {
  std::vector<FeatureId> ids;
  if (key.empty()) return Coalition();
  std::size_t pos = 0;
  while (pos <= key.size()) {
    auto comma = key.find(',', pos);
    if (comma == std::string_view::npos) comma = key.size();
    auto token = key.substr(pos, comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    FeatureId id = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
    if (token.empty() || ec != std::errc() || end != token.data() + token.size()) {
      throw InvalidArgument("malformed coalition key '" + std::string(key) + "'");
    }
    ids.push_back(id);
    pos = comma + 1;
  }
  return Coalition(std::move(ids));
}

bool Coalition::contains(FeatureId id) const {
  return std::binary_search(members_.begin(), members_.end(), id);
}

CoalitionMask Coalition::to_mask(const FeatureSet& features) const {
  CoalitionMask mask = 0;
  for (FeatureId id : members_) {
    auto index = features.index_of(id);
    if (!index) {
      throw InvalidArgument("feature id " + std::to_string(id) + " is not in the feature set");
    }
    mask |= CoalitionMask{1} << *index;
  }
  return mask;
}

}  // namespace shapkit
