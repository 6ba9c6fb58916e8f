#include <httplib.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "shapkit/error.hpp"
#include "shapkit/llm/client.hpp"

namespace shapkit::llm {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

struct Endpoint {
  std::string scheme_host_port;
  std::string base_path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("endpoint URL needs a scheme: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.scheme_host_port = url.substr(0, path_start);
  e.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  return e;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

InferenceConfig InferenceConfig::deterministic() {
  InferenceConfig config;
  config.temperature = 0.0;
  config.seed = 42;
  return config;
}

std::string InferenceConfig::fingerprint() const {
  return "model=" + model + ";temperature=" + shortest(temperature) +
         ";seed=" + (seed ? std::to_string(*seed) : "none");
}

void InferenceConfig::validate() const {
  if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be non-negative");
  if (model.empty()) throw InvalidArgument("model name must not be empty");
  if (embedding_model.empty()) throw InvalidArgument("embedding model name must not be empty");
}

OpenAiClient::OpenAiClient(std::optional<std::string> api_key) : api_key_(std::move(api_key)) {
  if (!api_key_) {
    if (const char* env = std::getenv(kApiKeyEnvVar); env && *env) api_key_ = env;
  }
}

std::string OpenAiClient::post_json(const InferenceConfig& config, const std::string& path,
                                    const std::string& body) {
  const auto endpoint = split_endpoint(config.endpoint_url);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config.timeout_seconds));

  httplib::Headers headers;
  if (api_key_) headers.emplace("Authorization", "Bearer " + *api_key_);

  std::string last_error;
  int last_status = 0;
  for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = config.initial_backoff_seconds * static_cast<double>(1ULL << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    httplib::Client client(endpoint.scheme_host_port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto response = client.Post(endpoint.base_path + path, headers, body, "application/json");
    if (!response) {
      last_error = httplib::to_string(response.error());
      last_status = 0;
      continue;
    }
    if (response->status >= 200 && response->status < 300) return response->body;
    last_status = response->status;
    last_error = "HTTP " + std::to_string(response->status) + ": " + response->body.substr(0, 200);
    if (!retryable(response->status)) break;
  }
  throw TransportError("POST " + config.endpoint_url + path + " failed: " + last_error,
                       last_status);
}

std::string OpenAiClient::complete(const std::string& prompt, const InferenceConfig& config) {
  nlohmann::json request = {
      {"model", config.model},
      {"temperature", config.temperature},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
  };
  if (config.seed) request["seed"] = *config.seed;
  const auto body = post_json(config, "/chat/completions", request.dump());
  try {
    const auto doc = nlohmann::json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat completion response: ") + e.what());
  }
}

std::vector<double> OpenAiClient::embed(const std::string& text, const InferenceConfig& config) {
  nlohmann::json request = {{"model", config.embedding_model}, {"input", text}};
  const auto body = post_json(config, "/embeddings", request.dump());
  try {
    const auto doc = nlohmann::json::parse(body);
    return doc.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed embeddings response: ") + e.what());
  }
}

}  // namespace shapkit::llm
