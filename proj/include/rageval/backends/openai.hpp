#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "rageval/backends/chat.hpp"
#include "rageval/backends/embedding.hpp"
#include "rageval/core/json.hpp"

namespace rageval {

struct HttpResponse {
  int status = 0;            // 0 when the request never completed
  std::string body;
  std::string error;         // transport failure description
  std::optional<double> retry_after_seconds;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // POST `body` (JSON) to `path` relative to the configured base URL.
  virtual HttpResponse post_json(const std::string& path, const std::string& body) = 0;
};

// cpp-httplib transport with bearer-token auth.
class HttplibTransport final : public HttpTransport {
 public:
  HttplibTransport(std::string base_url, std::string api_key, std::chrono::seconds timeout = std::chrono::seconds(60));
  HttpResponse post_json(const std::string& path, const std::string& body) override;

 private:
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // e.g. "/v1"
  std::string api_key_;
  std::chrono::seconds timeout_;
};

struct RetryPolicy {
  // Total tries per request, the first included.
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{20000};
};

struct OpenAiOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  RetryPolicy retry;
  int max_in_flight = 4;
  std::optional<long> seed = 0;
  std::string embedding_model = "text-embedding-3-small";
};

// Reads RAGEVAL_API_KEY and RAGEVAL_BASE_URL into `options` when set.
void apply_environment(OpenAiOptions& options);

// Shared request path: bounded in-flight requests, retry with exponential
// backoff on transport errors, 5xx and 429.
class OpenAiClient {
 public:
  OpenAiClient(OpenAiOptions options, std::shared_ptr<HttpTransport> transport);

  // Errors: network_error, http_error(status), rate_limited.
  Json post(const std::string& path, const Json& body);
  const OpenAiOptions& options() const noexcept { return options_; }

 private:
  OpenAiOptions options_;
  std::shared_ptr<HttpTransport> transport_;
  std::counting_semaphore<> in_flight_;
};

// POST {base_url}/chat/completions; text from choices[0].message.content.
class OpenAiChat final : public ChatBackend {
 public:
  explicit OpenAiChat(std::shared_ptr<OpenAiClient> client);
  std::string backend_id() const override { return "openai"; }

  static Json request_body(const ChatRequest& request, std::optional<long> seed);

 protected:
  std::string do_complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<OpenAiClient> client_;
};

// POST {base_url}/embeddings with {model, input:[...]}; vectors from data[i].embedding.
class OpenAiEmbedder final : public Embedder {
 public:
  explicit OpenAiEmbedder(std::shared_ptr<OpenAiClient> client);
  std::string model_id() const override;

 protected:
  std::vector<EmbeddingVector> do_embed(std::span<const std::string> texts) override;

 private:
  std::shared_ptr<OpenAiClient> client_;
};

}  // namespace rageval
