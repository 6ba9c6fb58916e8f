#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace shapkit::llm {

inline constexpr const char* kApiKeyEnvVar = "LLMSHAP_API_KEY";

struct InferenceConfig {
  std::string model = "gpt-4.1-mini";
  double temperature = 0.2;
  std::optional<std::int64_t> seed;
  std::string endpoint_url = "https://api.openai.com/v1";
  std::size_t max_retries = 3;
  double timeout_seconds = 60.0;
  /// First retry delay; doubles on every further attempt.
  double initial_backoff_seconds = 0.5;
  std::string embedding_model = "all-MiniLM-L6-v2";

  /// temperature 0 with seed 42.
  static InferenceConfig deterministic();

  /// Identifies the sampling behaviour for transcript keys: model, temperature, seed.
  std::string fingerprint() const;

  /// Throws InvalidArgument on a negative temperature or empty model names.
  void validate() const;
};

/// Remote model access. Implementations must be callable from several threads.
class InferenceClient {
 public:
  virtual ~InferenceClient() = default;
  virtual std::string complete(const std::string& prompt, const InferenceConfig& config) = 0;
  virtual std::vector<double> embed(const std::string& text, const InferenceConfig& config) = 0;
};

/// OpenAI-compatible HTTP client (chat completions + embeddings).
///
/// Retries connection failures, 429 and 5xx responses with exponential
/// backoff, then raises TransportError.
class OpenAiClient final : public InferenceClient {
 public:
  /// `api_key` defaults to the LLMSHAP_API_KEY environment variable.
  explicit OpenAiClient(std::optional<std::string> api_key = std::nullopt);

  std::string complete(const std::string& prompt, const InferenceConfig& config) override;
  std::vector<double> embed(const std::string& text, const InferenceConfig& config) override;

 private:
  std::string post_json(const InferenceConfig& config, const std::string& path,
                        const std::string& body);

  std::optional<std::string> api_key_;
};

}  // namespace shapkit::llm
