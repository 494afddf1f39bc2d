#include "rageval/backends/openai.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "rageval/error.hpp"

namespace rageval {

HttplibTransport::HttplibTransport(std::string base_url, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
  auto scheme = base_url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::config_error, "base URL needs a scheme: " + base_url);
  auto slash = base_url.find('/', scheme + 3);
  origin_ = base_url.substr(0, slash);
  path_prefix_ = slash == std::string::npos ? "" : base_url.substr(slash);
}

HttpResponse HttplibTransport::post_json(const std::string& path, const std::string& body) {
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  HttpResponse out;
  auto res = client.Post(path_prefix_ + path, headers, body, "application/json");
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  if (res->has_header("Retry-After")) {
    char* end = nullptr;
    std::string v = res->get_header_value("Retry-After");
    double secs = std::strtod(v.c_str(), &end);
    if (end != v.c_str()) out.retry_after_seconds = secs;
  }
  return out;
}

void apply_environment(OpenAiOptions& options) {
  if (const char* key = std::getenv("RAGEVAL_API_KEY"); key && *key) options.api_key = key;
  if (const char* url = std::getenv("RAGEVAL_BASE_URL"); url && *url) options.base_url = url;
}

OpenAiClient::OpenAiClient(OpenAiOptions options, std::shared_ptr<HttpTransport> transport)
    : options_(std::move(options)),
      transport_(std::move(transport)),
      in_flight_(std::max(1, options_.max_in_flight)) {
  if (options_.retry.max_attempts < 1) throw Error(ErrorCode::config_error, "max_attempts must be >= 1");
}

Json OpenAiClient::post(const std::string& path, const Json& body) {
  const std::string payload = body.dump();
  const int attempts = options_.retry.max_attempts;
  std::chrono::milliseconds delay = options_.retry.base_delay;

  for (int attempt = 1;; ++attempt) {
    HttpResponse res;
    {
      in_flight_.acquire();
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{in_flight_};
      res = transport_->post_json(path, payload);
    }

    std::optional<Error> failure;
    std::chrono::milliseconds wait = delay;
    if (res.status == 0) {
      failure.emplace(ErrorCode::network_error, res.error.empty() ? "request failed" : res.error);
    } else if (res.status == 429) {
      failure.emplace(ErrorCode::rate_limited, path, 429);
      if (res.retry_after_seconds) {
        wait = std::chrono::milliseconds(static_cast<long>(*res.retry_after_seconds * 1000.0));
      }
    } else if (res.status >= 500) {
      failure.emplace(ErrorCode::http_error, path, res.status);
    } else if (res.status < 200 || res.status >= 300) {
      throw Error(ErrorCode::http_error, path + ": " + res.body.substr(0, 200), res.status);
    } else {
      try {
        return Json::parse(res.body);
      } catch (const Json::parse_error&) {
        throw Error(ErrorCode::http_error, path + ": response is not JSON", res.status);
      }
    }

    if (attempt >= attempts) throw *failure;
    std::this_thread::sleep_for(std::min(wait, options_.retry.max_delay));
    delay = std::min(delay * 2, options_.retry.max_delay);
  }
}

OpenAiChat::OpenAiChat(std::shared_ptr<OpenAiClient> client) : client_(std::move(client)) {}

Json OpenAiChat::request_body(const ChatRequest& request, std::optional<long> seed) {
  Json msgs = Json::array();
  for (const auto& m : request.messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  Json body = Json::object();
  body["model"] = request.model;
  body["messages"] = std::move(msgs);
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  if (request.seed) {
    body["seed"] = *request.seed;
  } else if (seed) {
    body["seed"] = *seed;
  }
  return body;
}

std::string OpenAiChat::do_complete(const ChatRequest& request) {
  Json res = client_->post("/chat/completions", request_body(request, client_->options().seed));
  try {
    const Json& content = res.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
  } catch (const Json::exception&) {
  }
  throw Error(ErrorCode::empty_completion, request.request_tag);
}

OpenAiEmbedder::OpenAiEmbedder(std::shared_ptr<OpenAiClient> client) : client_(std::move(client)) {}

std::string OpenAiEmbedder::model_id() const { return client_->options().embedding_model; }

std::vector<EmbeddingVector> OpenAiEmbedder::do_embed(std::span<const std::string> texts) {
  Json body = Json::object();
  body["model"] = model_id();
  body["input"] = Json::array();
  for (const auto& t : texts) body["input"].push_back(t);
  Json res = client_->post("/embeddings", body);

  std::vector<EmbeddingVector> out(texts.size());
  try {
    const Json& data = res.at("data");
    if (data.size() != texts.size()) {
      throw Error(ErrorCode::dim_mismatch, "expected " + std::to_string(texts.size()) + " embeddings");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t slot = data[i].contains("index") ? data[i]["index"].get<std::size_t>() : i;
      if (slot >= out.size()) throw Error(ErrorCode::dim_mismatch, "embedding index out of range");
      out[slot] = EmbeddingVector{data[i].at("embedding").get<std::vector<double>>(), model_id()};
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::http_error, std::string("malformed embeddings response: ") + e.what(), 200);
  }
  return out;
}

}  // namespace rageval
