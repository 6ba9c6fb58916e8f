#pragma once

#include <string>

#include "shapkit/llm/client.hpp"
#include "shapkit/llm/prompt.hpp"
#include "shapkit/llm/transcript.hpp"
#include "shapkit/payoff.hpp"

namespace shapkit::llm {

struct LlmPayoffOptions {
  /// Score the grand coalition as the pinned base answer (payoff 1) instead
  /// of drawing a fresh answer for it.
  bool reuse_base_for_grand = false;
};

/// Payoff of a coalition = cosine similarity between the embedding of the
/// model's answer to the coalition prompt and that of the base answer.
///
/// The base answer to the full prompt is drawn once, at construction, and
/// pinned for the lifetime of the source.
class LlmPayoffSource final : public PayoffSource {
 public:
  LlmPayoffSource(FeatureSet features, PromptTemplate tmpl, InferenceConfig config,
                  TranscriptStore& store, LlmPayoffOptions options = {});

  double evaluate(const Coalition& coalition) override;
  bool is_deterministic() const override { return false; }
  std::string description() const override;

  const std::string& base_answer() const noexcept { return base_answer_; }
  const FeatureSet& features() const noexcept { return features_; }

 private:
  FeatureSet features_;
  PromptTemplate template_;
  InferenceConfig config_;
  TranscriptStore& store_;
  LlmPayoffOptions options_;
  std::string base_answer_;
  EmbeddingVector base_embedding_;
};

}  // namespace shapkit::llm
