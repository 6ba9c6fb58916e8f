#include "shapkit/cli/run_config.hpp"

namespace shapkit::cli {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kTable:
      return "table";
    case SourceKind::kNoisy:
      return "noisy";
    case SourceKind::kLlm:
      return "llm";
  }
  return "unknown";
}

SourceKind parse_source_kind(std::string_view tag) {
  if (tag == "table") return SourceKind::kTable;
  if (tag == "noisy") return SourceKind::kNoisy;
  if (tag == "llm") return SourceKind::kLlm;
  throw UsageError("unknown source '" + std::string(tag) + "'");
}

AttributionOptions RunConfig::attribution_options() const {
  AttributionOptions options;
  options.workers = workers;
  options.samples = samples;
  return options;
}

nlohmann::json to_json(const RunConfig& config) {
  auto path_or_null = [](const std::optional<std::filesystem::path>& p) {
    return p ? nlohmann::json(p->generic_string()) : nlohmann::json(nullptr);
  };
  nlohmann::json methods = nlohmann::json::array();
  for (auto m : config.methods) methods.push_back(to_string(m));
  nlohmann::json games = nlohmann::json::array();
  for (const auto& g : config.games) games.push_back(g.generic_string());

  nlohmann::json j = {
      {"method", to_string(config.method)},
      {"methods", std::move(methods)},
      {"window_size", config.window_size ? nlohmann::json(*config.window_size) : nlohmann::json()},
      {"window_context", to_string(config.window_context)},
      {"window_cache", config.window_cache},
      {"samples", config.samples},
      {"workers", config.workers},
      {"seed", config.seed ? nlohmann::json(*config.seed) : nlohmann::json()},
      {"tolerance", config.tolerance},
      {"source", to_string(config.source)},
      {"games", std::move(games)},
      {"out", path_or_null(config.out)},
  };
  if (config.source == SourceKind::kNoisy) j["noise_std"] = config.noise_std;
  if (config.source == SourceKind::kLlm || config.dataset) {
    const auto& inf = config.inference;
    j["dataset"] = path_or_null(config.dataset);
    j["instances"] = config.instances;
    j["feature_range"] = {config.min_features, config.max_features};
    j["transcript"] = path_or_null(config.transcript);
    j["mode"] = llm::to_string(config.mode);
    j["reuse_base_for_grand"] = config.reuse_base_for_grand;
    j["inference"] = {{"model", inf.model},
                      {"temperature", inf.temperature},
                      {"seed", inf.seed ? nlohmann::json(*inf.seed) : nlohmann::json()},
                      {"endpoint_url", inf.endpoint_url},
                      {"embedding_model", inf.embedding_model},
                      {"max_retries", inf.max_retries},
                      {"timeout_seconds", inf.timeout_seconds}};
  }
  return j;
}

}  // namespace shapkit::cli
