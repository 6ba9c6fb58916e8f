#pragma once

#include <string>

#include "shapkit/coalition.hpp"
#include "shapkit/feature.hpp"

namespace shapkit::llm {

/// prefix + content of the coalition's features joined by `joiner` + suffix.
struct PromptTemplate {
  std::string prefix;
  std::string joiner = ", ";
  std::string suffix;

  /// Patient-symptom diagnosis question used by the dataset experiments.
  static PromptTemplate symptoms();
};

/// Lists the content of exactly the features in `coalition`, in FeatureSet
/// order. The empty coalition renders with an empty list. Throws
/// InvalidArgument if the coalition names a feature outside `features`.
std::string render_prompt(const PromptTemplate& tmpl, const FeatureSet& features,
                          const Coalition& coalition);

}  // namespace shapkit::llm
