#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rageval {

enum class Role { system, user };
std::string_view to_string(Role r);

struct ChatMessage {
  Role role = Role::user;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<long> seed;
  // "<metric>:<sample_id>:<step>", used by scripted backends and logs.
  std::string request_tag;
  // Position of this call within a multi-call step (per-question generation).
  int sequence = 0;
  // 0 for the first try, incremented on each parse retry.
  int attempt = 0;

  // Concatenated message contents, the text prompt rules match against.
  std::string prompt_text() const;
  // Deterministic serialization of everything that can change a completion.
  // The request tag is excluded; sequence and attempt are included so
  // retries and repeated questions cache separately.
  std::string canonical() const;
};

// Convenience for the single-user-message requests the metrics issue.
ChatRequest make_user_request(std::string model, std::string prompt, std::string tag);

struct CacheKey {
  std::string backend_id;
  std::string model;
  std::string prompt_digest;  // SHA-256 hex of ChatRequest::canonical()

  std::string str() const;
  bool operator==(const CacheKey&) const = default;
};

CacheKey make_cache_key(std::string_view backend_id, const ChatRequest& request);

// One prompt/completion exchange as recorded in a metric trace.
struct ChatExchange {
  std::string request_tag;
  int sequence = 0;
  int attempt = 0;
  std::string prompt;
  std::string completion;

  bool operator==(const ChatExchange&) const = default;
};

// A judge LLM. Implementations must be safe to call from many threads.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  virtual std::string backend_id() const = 0;

  // Returns the raw completion text. Throws Error(precondition) when the
  // request has no user message; backend failures surface as Error with a
  // backend error code.
  std::string complete(const ChatRequest& request);

 protected:
  virtual std::string do_complete(const ChatRequest& request) = 0;
};

}  // namespace rageval
