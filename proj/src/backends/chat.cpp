#include "rageval/backends/chat.hpp"

#include <algorithm>

#include "rageval/core/digest.hpp"
#include "rageval/core/json.hpp"
#include "rageval/error.hpp"

namespace rageval {

std::string_view to_string(Role r) { return r == Role::system ? "system" : "user"; }

std::string ChatRequest::prompt_text() const {
  std::string out;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (i > 0) out += "\n";
    out += messages[i].content;
  }
  return out;
}

std::string ChatRequest::canonical() const {
  Json j = Json::object();
  j["model"] = model;
  Json msgs = Json::array();
  for (const auto& m : messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  j["messages"] = std::move(msgs);
  j["temperature"] = temperature;
  j["max_tokens"] = max_tokens;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  j["sequence"] = sequence;
  j["attempt"] = attempt;
  return j.dump();
}

ChatRequest make_user_request(std::string model, std::string prompt, std::string tag) {
  ChatRequest r;
  r.model = std::move(model);
  r.messages.push_back({Role::user, std::move(prompt)});
  r.request_tag = std::move(tag);
  return r;
}

std::string CacheKey::str() const { return backend_id + "|" + model + "|" + prompt_digest; }

CacheKey make_cache_key(std::string_view backend_id, const ChatRequest& request) {
  return CacheKey{std::string(backend_id), request.model, sha256_hex(request.canonical())};
}

std::string ChatBackend::complete(const ChatRequest& request) {
  bool has_user = std::any_of(request.messages.begin(), request.messages.end(),
                              [](const ChatMessage& m) { return m.role == Role::user; });
  if (!has_user) throw Error(ErrorCode::precondition, "chat request needs a user message");
  if (request.temperature < 0) throw Error(ErrorCode::precondition, "temperature must be >= 0");
  if (request.max_tokens <= 0) throw Error(ErrorCode::precondition, "max_tokens must be positive");
  return do_complete(request);
}

}  // namespace rageval
