#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

#include "shapkit/llm/client.hpp"
#include "shapkit/llm/similarity.hpp"

namespace shapkit::llm {

enum class TranscriptMode { kRecord, kReplay, kLive };

std::string_view to_string(TranscriptMode mode);
TranscriptMode parse_transcript_mode(std::string_view tag);

/// Hex SHA-256 of `text`.
std::string sha256_hex(const std::string& text);

/// Durable record of completions and embeddings for offline replay.
///
/// Completions are keyed by (prompt hash, config fingerprint, draw index);
/// each request for the same prompt and config takes the next draw index, so
/// repeated stochastic draws are replayed in order. Embeddings are keyed by
/// (model, text hash).
///
/// - record: serves stored records, otherwise calls the client and appends a
///   JSON line to the transcript file.
/// - replay: never touches the network; a missing record raises ReplayMiss.
/// - live: always calls the client for completions; nothing is persisted.
class TranscriptStore {
 public:
  /// Loads `path` if it exists (required in replay mode). `client` may be
  /// null in replay mode.
  TranscriptStore(TranscriptMode mode, std::optional<std::filesystem::path> path,
                  std::shared_ptr<InferenceClient> client);

  TranscriptStore(const TranscriptStore&) = delete;
  TranscriptStore& operator=(const TranscriptStore&) = delete;

  std::string complete(const std::string& prompt, const InferenceConfig& config);
  EmbeddingVector embed(const std::string& text, const InferenceConfig& config);

  /// Restarts every prompt's draw sequence at index 0.
  void reset_draw_counters();

  TranscriptMode mode() const noexcept { return mode_; }
  std::size_t completion_count() const;
  std::size_t embedding_count() const;
  /// Client calls made by this store.
  std::size_t network_calls() const;

 private:
  using CompletionKey = std::tuple<std::string, std::string, std::size_t>;
  using EmbeddingKey = std::pair<std::string, std::string>;

  void load(const std::filesystem::path& path);
  /// Caller holds mutex_. Throws Error if `model` was seen with another length.
  void check_dimension(const std::string& model, std::size_t size);
  void append(const std::string& line);
  InferenceClient& client();

  TranscriptMode mode_;
  std::optional<std::filesystem::path> path_;
  std::shared_ptr<InferenceClient> client_;

  mutable std::mutex mutex_;
  std::map<CompletionKey, std::string> completions_;
  std::map<EmbeddingKey, std::vector<double>> embeddings_;
  /// Vector length seen per embedding model.
  std::map<std::string, std::size_t> dimensions_;
  std::map<std::pair<std::string, std::string>, std::size_t> next_draw_;
  std::size_t network_calls_ = 0;

  std::mutex file_mutex_;
  std::ofstream out_;
};

}  // namespace shapkit::llm
