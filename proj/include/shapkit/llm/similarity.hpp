#pragma once

#include <span>
#include <string>
#include <vector>

#include "shapkit/attribution.hpp"

namespace shapkit::llm {

inline constexpr const char* kDefaultEmbeddingModel = "all-MiniLM-L6-v2";

struct EmbeddingVector {
  std::vector<double> values;
  std::string model = kDefaultEmbeddingModel;
};

/// (u . v) / (|u| |v|), clamped to [-1, 1] against rounding.
/// Throws InvalidArgument on a length mismatch and ZeroVector if either norm is 0.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

inline double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  return cosine_similarity(u.values, v.values);
}

/// Cosine similarity of two attribution vectors aligned by feature id.
double compare_attributions(const AttributionResult& a, const AttributionResult& gold,
                            const FeatureSet& features);

}  // namespace shapkit::llm
