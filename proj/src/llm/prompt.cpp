#include "shapkit/llm/prompt.hpp"

#include "shapkit/error.hpp"

namespace shapkit::llm {

PromptTemplate PromptTemplate::symptoms() {
  return {"A patient is showing the following symptom(s): ", ", ",
          ". Based on these symptom(s), what disease or condition do you think they most "
          "likely have?"};
}

std::string render_prompt(const PromptTemplate& tmpl, const FeatureSet& features,
                          const Coalition& coalition) {
  const CoalitionMask mask = coalition.to_mask(features);
  std::string out = tmpl.prefix;
  bool first = true;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!(mask & (CoalitionMask{1} << i))) continue;
    if (!first) out += tmpl.joiner;
    out += features[i].content;
    first = false;
  }
  out += tmpl.suffix;
  return out;
}

}  // namespace shapkit::llm
