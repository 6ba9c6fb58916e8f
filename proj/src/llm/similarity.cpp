#include "shapkit/llm/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "shapkit/error.hpp"

namespace shapkit::llm {

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw InvalidArgument("cosine similarity of vectors with lengths " + std::to_string(u.size()) +
                          " and " + std::to_string(v.size()));
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVector("cosine similarity of a zero vector is undefined");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

double compare_attributions(const AttributionResult& a, const AttributionResult& gold,
                            const FeatureSet& features) {
  return cosine_similarity(a.score_vector(features), gold.score_vector(features));
}

}  // namespace shapkit::llm
