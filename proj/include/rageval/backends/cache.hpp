#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "rageval/backends/chat.hpp"

namespace rageval {

// Persistent completion cache: an append-only JSONL file of
// {"key", "response"} records loaded at construction. Reads run
// concurrently; writes go through one writer lock.
class ResponseCache {
 public:
  // In-memory only.
  ResponseCache() = default;
  // Loads `path` if it exists and appends new entries to it.
  explicit ResponseCache(std::filesystem::path path);

  std::optional<std::string> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, const std::string& response);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
  std::filesystem::path path_;
  std::ofstream out_;
};

// Consults the cache before the wrapped backend; misses are stored.
class CachedChat final : public ChatBackend {
 public:
  CachedChat(ChatBackend& inner, std::shared_ptr<ResponseCache> cache);

  std::string backend_id() const override { return inner_.backend_id(); }
  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }

 protected:
  std::string do_complete(const ChatRequest& request) override;

 private:
  ChatBackend& inner_;
  std::shared_ptr<ResponseCache> cache_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

// Reports (request, response, latency) for every call to a sink.
struct CallRecord {
  ChatRequest request;
  std::string response;
  std::chrono::microseconds latency{0};
  std::string error;  // empty on success
};

class RecordingChat final : public ChatBackend {
 public:
  using Sink = std::function<void(const CallRecord&)>;
  RecordingChat(ChatBackend& inner, Sink sink);

  std::string backend_id() const override { return inner_.backend_id(); }

 protected:
  std::string do_complete(const ChatRequest& request) override;

 private:
  ChatBackend& inner_;
  Sink sink_;
};

}  // namespace rageval
