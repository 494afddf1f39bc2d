#include "rageval/backends/cache.hpp"

#include "rageval/core/json.hpp"
#include "rageval/core/text.hpp"
#include "rageval/error.hpp"

namespace rageval {

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  if (std::ifstream in(path_, std::ios::binary); in) {
    std::string line;
    while (std::getline(in, line)) {
      if (text::trim(line).empty()) continue;
      try {
        Json rec = Json::parse(line);
        entries_[rec.at("key").get<std::string>()] = rec.at("response").get<std::string>();
      } catch (const Json::exception&) {
        // A torn final line from an interrupted run; later records still load.
        continue;
      }
    }
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorCode::unwritable_output, "cache file " + path_.string());
}

std::optional<std::string> ResponseCache::lookup(const CacheKey& key) const {
  std::shared_lock lock(mutex_);
  if (auto it = entries_.find(key.str()); it != entries_.end()) return it->second;
  return std::nullopt;
}

void ResponseCache::store(const CacheKey& key, const std::string& response) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.emplace(key.str(), response);
  if (!inserted || !out_.is_open()) return;
  Json rec = Json::object();
  rec["key"] = key.str();
  rec["response"] = response;
  out_ << rec.dump() << '\n';
  out_.flush();
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

CachedChat::CachedChat(ChatBackend& inner, std::shared_ptr<ResponseCache> cache)
    : inner_(inner), cache_(std::move(cache)) {}

std::string CachedChat::do_complete(const ChatRequest& request) {
  CacheKey key = make_cache_key(inner_.backend_id(), request);
  if (auto hit = cache_->lookup(key)) {
    ++hits_;
    return *hit;
  }
  ++misses_;
  std::string response = inner_.complete(request);
  cache_->store(key, response);
  return response;
}

RecordingChat::RecordingChat(ChatBackend& inner, Sink sink) : inner_(inner), sink_(std::move(sink)) {}

std::string RecordingChat::do_complete(const ChatRequest& request) {
  auto start = std::chrono::steady_clock::now();
  CallRecord rec{request, {}, {}, {}};
  try {
    rec.response = inner_.complete(request);
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.latency = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
    sink_(rec);
    throw;
  }
  rec.latency = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  sink_(rec);
  return rec.response;
}

}  // namespace rageval
