#include "shapkit/llm/transcript.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <json.hpp>

#include "shapkit/error.hpp"

namespace shapkit::llm {

std::string_view to_string(TranscriptMode mode) {
  switch (mode) {
    case TranscriptMode::kRecord:
      return "record";
    case TranscriptMode::kReplay:
      return "replay";
    case TranscriptMode::kLive:
      return "live";
  }
  return "unknown";
}

TranscriptMode parse_transcript_mode(std::string_view tag) {
  if (tag == "record") return TranscriptMode::kRecord;
  if (tag == "replay") return TranscriptMode::kReplay;
  if (tag == "live") return TranscriptMode::kLive;
  throw InvalidArgument("unknown transcript mode '" + std::string(tag) + "'");
}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

TranscriptStore::TranscriptStore(TranscriptMode mode, std::optional<std::filesystem::path> path,
                                 std::shared_ptr<InferenceClient> client)
    : mode_(mode), path_(std::move(path)), client_(std::move(client)) {
  if (mode_ == TranscriptMode::kReplay) {
    if (!path_) throw InvalidArgument("replay mode needs a transcript file");
    if (!std::filesystem::exists(*path_)) {
      throw ReplayMiss("transcript " + path_->string() + " does not exist");
    }
  }
  if (mode_ != TranscriptMode::kReplay && !client_) {
    throw InvalidArgument(std::string(to_string(mode_)) + " mode needs an inference client");
  }
  if (mode_ == TranscriptMode::kRecord && !path_) {
    throw InvalidArgument("record mode needs a transcript file");
  }
  if (path_ && mode_ != TranscriptMode::kLive && std::filesystem::exists(*path_)) load(*path_);
  if (mode_ == TranscriptMode::kRecord) {
    out_.open(*path_, std::ios::app);
    if (!out_) throw Error("cannot open transcript " + path_->string() + " for writing");
  }
}

void TranscriptStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read transcript " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      const auto kind = record.at("kind").get<std::string>();
      if (kind == "completion") {
        CompletionKey key{record.at("prompt_sha256").get<std::string>(),
                          record.at("config").get<std::string>(),
                          record.at("draw").get<std::size_t>()};
        completions_.emplace(std::move(key), record.at("text").get<std::string>());
      } else if (kind == "embedding") {
        EmbeddingKey key{record.at("model").get<std::string>(),
                         record.at("text_sha256").get<std::string>()};
        auto values = record.at("vector").get<std::vector<double>>();
        check_dimension(key.first, values.size());
        embeddings_.emplace(std::move(key), std::move(values));
      } else {
        throw Error("unknown record kind '" + kind + "'");
      }
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void TranscriptStore::check_dimension(const std::string& model, std::size_t size) {
  auto [it, fresh] = dimensions_.emplace(model, size);
  if (!fresh && it->second != size) {
    throw Error("embedding dimension for model " + model + " changed from " +
                std::to_string(it->second) + " to " + std::to_string(size));
  }
}

void TranscriptStore::append(const std::string& line) {
  std::lock_guard lock(file_mutex_);
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw Error("failed writing transcript " + path_->string());
}

InferenceClient& TranscriptStore::client() {
  std::lock_guard lock(mutex_);
  ++network_calls_;
  return *client_;
}

std::string TranscriptStore::complete(const std::string& prompt, const InferenceConfig& config) {
  const auto prompt_hash = sha256_hex(prompt);
  const auto fingerprint = config.fingerprint();
  CompletionKey key;
  {
    std::lock_guard lock(mutex_);
    const std::size_t draw = next_draw_[{prompt_hash, fingerprint}]++;
    key = {prompt_hash, fingerprint, draw};
    if (mode_ != TranscriptMode::kLive) {
      if (auto it = completions_.find(key); it != completions_.end()) return it->second;
    }
  }
  if (mode_ == TranscriptMode::kReplay) {
    throw ReplayMiss("no recorded completion (draw " + std::to_string(std::get<2>(key)) +
                     ", " + fingerprint + ") for prompt: " + prompt);
  }

  auto text = client().complete(prompt, config);
  if (mode_ == TranscriptMode::kRecord) {
    bool inserted = false;
    {
      std::lock_guard lock(mutex_);
      inserted = completions_.emplace(key, text).second;
    }
    if (inserted) {
      append(nlohmann::json{{"kind", "completion"},
                            {"prompt_sha256", prompt_hash},
                            {"config", fingerprint},
                            {"draw", std::get<2>(key)},
                            {"prompt", prompt},
                            {"text", text}}
                 .dump());
    }
  }
  return text;
}

EmbeddingVector TranscriptStore::embed(const std::string& text, const InferenceConfig& config) {
  EmbeddingKey key{config.embedding_model, sha256_hex(text)};
  {
    std::lock_guard lock(mutex_);
    if (auto it = embeddings_.find(key); it != embeddings_.end()) {
      return {it->second, config.embedding_model};
    }
  }
  if (mode_ == TranscriptMode::kReplay) {
    throw ReplayMiss("no recorded " + config.embedding_model + " embedding for text: " + text);
  }

  auto values = client().embed(text, config);
  if (values.empty()) throw TransportError("embedding endpoint returned an empty vector");
  for (double v : values) {
    if (!std::isfinite(v)) throw TransportError("embedding endpoint returned a non-finite value");
  }
  bool inserted = false;
  {
    std::lock_guard lock(mutex_);
    check_dimension(key.first, values.size());
    inserted = embeddings_.emplace(key, values).second;
  }
  if (inserted && mode_ == TranscriptMode::kRecord) {
    append(nlohmann::json{{"kind", "embedding"},
                          {"model", key.first},
                          {"text_sha256", key.second},
                          {"text", text},
                          {"vector", values}}
               .dump());
  }
  return {std::move(values), config.embedding_model};
}

void TranscriptStore::reset_draw_counters() {
  std::lock_guard lock(mutex_);
  next_draw_.clear();
}

std::size_t TranscriptStore::completion_count() const {
  std::lock_guard lock(mutex_);
  return completions_.size();
}

std::size_t TranscriptStore::embedding_count() const {
  std::lock_guard lock(mutex_);
  return embeddings_.size();
}

std::size_t TranscriptStore::network_calls() const {
  std::lock_guard lock(mutex_);
  return network_calls_;
}

}  // namespace shapkit::llm
