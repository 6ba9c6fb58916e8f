#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapkit/attribution.hpp"
#include "shapkit/llm/client.hpp"
#include "shapkit/llm/transcript.hpp"

namespace shapkit::cli {

enum class SourceKind { kTable, kNoisy, kLlm };

std::string_view to_string(SourceKind kind);
SourceKind parse_source_kind(std::string_view tag);

/// Raised for invalid combinations of options; maps to exit code 2.
class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Fully resolved settings of one CLI run. Embedded in every report.
struct RunConfig {
  Method method = Method::kCached;
  std::vector<Method> methods;
  std::optional<std::size_t> window_size;
  WindowContext window_context = WindowContext::kHeld;
  bool window_cache = true;
  std::size_t samples = 1;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
  double tolerance = 1e-9;

  SourceKind source = SourceKind::kTable;
  std::vector<std::filesystem::path> games;
  double noise_std = 0.1;

  std::optional<std::filesystem::path> dataset;
  std::vector<std::size_t> instances;
  std::size_t min_features = 4;
  std::size_t max_features = 10;
  std::optional<std::filesystem::path> transcript;
  llm::TranscriptMode mode = llm::TranscriptMode::kReplay;
  llm::InferenceConfig inference;
  bool reuse_base_for_grand = false;

  std::size_t n_min = 4;
  std::size_t n_max = 10;
  std::size_t runs_per_point = 2;

  std::size_t trials = 100;
  std::size_t noisy_fixture = 0;
  bool allow_mismatch = false;

  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> report;

  AttributionOptions attribution_options() const;
};

nlohmann::json to_json(const RunConfig& config);

}  // namespace shapkit::cli
