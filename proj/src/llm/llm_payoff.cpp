#include "shapkit/llm/llm_payoff.hpp"

namespace shapkit::llm {

LlmPayoffSource::LlmPayoffSource(FeatureSet features, PromptTemplate tmpl, InferenceConfig config,
                                 TranscriptStore& store, LlmPayoffOptions options)
    : features_(std::move(features)),
      template_(std::move(tmpl)),
      config_(std::move(config)),
      store_(store),
      options_(options) {
  config_.validate();
  base_answer_ = store_.complete(render_prompt(template_, features_, Coalition::all(features_)),
                                 config_);
  base_embedding_ = store_.embed(base_answer_, config_);
}

double LlmPayoffSource::evaluate(const Coalition& coalition) {
  if (options_.reuse_base_for_grand && coalition.size() == features_.size()) {
    return cosine_similarity(base_embedding_, base_embedding_);
  }
  const auto answer = store_.complete(render_prompt(template_, features_, coalition), config_);
  return cosine_similarity(base_embedding_, store_.embed(answer, config_));
}

std::string LlmPayoffSource::description() const {
  return "llm(" + config_.fingerprint() + ", " + std::string(to_string(store_.mode())) + ")";
}

}  // namespace shapkit::llm
