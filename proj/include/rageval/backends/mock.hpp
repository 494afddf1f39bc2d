#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "rageval/backends/chat.hpp"
#include "rageval/backends/embedding.hpp"
#include "rageval/core/json.hpp"

namespace rageval {

// A scripted rule: matches on a request-tag prefix and/or a prompt
// substring (both must hold when both are set). `responses` is indexed by
// the request's attempt number; the last entry repeats.
struct ScriptRule {
  std::optional<std::string> request_tag_prefix;
  std::optional<std::string> prompt_substring;
  std::vector<std::string> responses;

  bool matches(const ChatRequest& request) const;
  const std::string& response_for(int attempt) const;
};

// Deterministic judge for tests and offline runs. First matching rule wins;
// a request no rule matches raises unmatched_request naming its tag.
class ScriptedChat final : public ChatBackend {
 public:
  explicit ScriptedChat(std::vector<ScriptRule> rules, std::string id = "mock");

  std::string backend_id() const override { return id_; }
  std::size_t call_count() const noexcept { return calls_.load(); }

 protected:
  std::string do_complete(const ChatRequest& request) override;

 private:
  std::vector<ScriptRule> rules_;
  std::string id_;
  std::atomic<std::size_t> calls_{0};
};

// Serves recorded exchanges back by (request_tag, sequence, attempt). A
// request whose rendered prompt differs from the recording is unmatched.
class ReplayChat final : public ChatBackend {
 public:
  explicit ReplayChat(const std::vector<ChatExchange>& exchanges);

  std::string backend_id() const override { return "replay"; }

 protected:
  std::string do_complete(const ChatRequest& request) override;

 private:
  std::map<std::tuple<std::string, int, int>, ChatExchange> by_key_;
};

// Bag-of-words feature hashing: deterministic, dependency-free vectors
// whose cosine tracks token overlap.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dim = 64, std::string model_id = "");

  std::string model_id() const override { return model_id_; }
  EmbeddingVector embed_one(const std::string& text) const;

 protected:
  std::vector<EmbeddingVector> do_embed(std::span<const std::string> texts) override;

 private:
  std::size_t dim_;
  std::string model_id_;
};

// Fixed text -> vector table; unknown texts go to the fallback embedder if
// one is set, else raise unmatched_request.
class TableEmbedder final : public Embedder {
 public:
  TableEmbedder(std::map<std::string, std::vector<double>> table, std::string model_id = "mock",
                std::shared_ptr<HashEmbedder> fallback = nullptr);

  std::string model_id() const override { return model_id_; }

 protected:
  std::vector<EmbeddingVector> do_embed(std::span<const std::string> texts) override;

 private:
  std::map<std::string, std::vector<double>> table_;
  std::string model_id_;
  std::shared_ptr<HashEmbedder> fallback_;
};

// Parsed mock script file: rules plus an optional embedding table.
struct MockScript {
  std::vector<ScriptRule> rules;
  std::map<std::string, std::vector<double>> embedding_table;
  std::string embedding_model_id = "mock";
  std::size_t fallback_dim = 64;  // 0 disables the hashing fallback
};

MockScript parse_mock_script(const Json& doc);
MockScript load_mock_script(const std::filesystem::path& path);
Json mock_script_to_json(const MockScript& script);

std::unique_ptr<ScriptedChat> make_scripted_chat(const MockScript& script);
std::unique_ptr<Embedder> make_mock_embedder(const MockScript& script);

}  // namespace rageval
