#include "rageval/backends/mock.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "rageval/error.hpp"

namespace rageval {

bool ScriptRule::matches(const ChatRequest& request) const {
  if (!request_tag_prefix && !prompt_substring) return false;
  if (request_tag_prefix && request.request_tag.rfind(*request_tag_prefix, 0) != 0) return false;
  if (prompt_substring && request.prompt_text().find(*prompt_substring) == std::string::npos) return false;
  return true;
}

const std::string& ScriptRule::response_for(int attempt) const {
  std::size_t i = attempt < 0 ? 0 : static_cast<std::size_t>(attempt);
  return responses[std::min(i, responses.size() - 1)];
}

ScriptedChat::ScriptedChat(std::vector<ScriptRule> rules, std::string id)
    : rules_(std::move(rules)), id_(std::move(id)) {
  for (const auto& r : rules_) {
    if (r.responses.empty()) throw Error(ErrorCode::config_error, "mock rule without a response");
  }
}

std::string ScriptedChat::do_complete(const ChatRequest& request) {
  ++calls_;
  for (const auto& rule : rules_) {
    if (rule.matches(request)) return rule.response_for(request.attempt);
  }
  throw Error(ErrorCode::unmatched_request, request.request_tag);
}

ReplayChat::ReplayChat(const std::vector<ChatExchange>& exchanges) {
  for (const auto& e : exchanges) by_key_[{e.request_tag, e.sequence, e.attempt}] = e;
}

std::string ReplayChat::do_complete(const ChatRequest& request) {
  auto it = by_key_.find({request.request_tag, request.sequence, request.attempt});
  if (it == by_key_.end()) {
    throw Error(ErrorCode::unmatched_request, request.request_tag + " attempt " + std::to_string(request.attempt));
  }
  if (it->second.prompt != request.prompt_text()) {
    throw Error(ErrorCode::unmatched_request, request.request_tag + ": recorded prompt differs");
  }
  return it->second.completion;
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

HashEmbedder::HashEmbedder(std::size_t dim, std::string model_id)
    : dim_(dim), model_id_(model_id.empty() ? "hash-" + std::to_string(dim) : std::move(model_id)) {
  if (dim_ == 0) throw Error(ErrorCode::config_error, "hash embedder dim must be positive");
}

EmbeddingVector HashEmbedder::embed_one(const std::string& text) const {
  EmbeddingVector v{std::vector<double>(dim_, 0.0), model_id_};
  std::string token;
  bool any = false;
  auto flush = [&] {
    if (token.empty()) return;
    std::uint64_t h = fnv1a(token);
    v.values[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    any = true;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  bool zero = true;
  for (double x : v.values) zero = zero && x == 0.0;
  if (!any || zero) v.values[fnv1a(text) % dim_] = 1.0;
  return v;
}

std::vector<EmbeddingVector> HashEmbedder::do_embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

TableEmbedder::TableEmbedder(std::map<std::string, std::vector<double>> table, std::string model_id,
                             std::shared_ptr<HashEmbedder> fallback)
    : table_(std::move(table)), model_id_(std::move(model_id)), fallback_(std::move(fallback)) {}

std::vector<EmbeddingVector> TableEmbedder::do_embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    if (auto it = table_.find(t); it != table_.end()) {
      out.push_back({it->second, model_id_});
    } else if (fallback_) {
      out.push_back({fallback_->embed_one(t).values, model_id_});
    } else {
      throw Error(ErrorCode::unmatched_request, "no embedding scripted for \"" + t + "\"");
    }
  }
  return out;
}

MockScript parse_mock_script(const Json& doc) {
  MockScript script;
  const Json* rules = nullptr;
  if (doc.is_array()) {
    rules = &doc;
  } else if (doc.is_object()) {
    if (auto it = doc.find("rules"); it != doc.end()) rules = &*it;
    if (auto it = doc.find("embeddings"); it != doc.end()) {
      const Json& e = *it;
      script.embedding_model_id = e.value("model_id", std::string("mock"));
      script.fallback_dim = e.value("fallback_dim", std::size_t{64});
      if (auto t = e.find("table"); t != e.end()) {
        for (auto row = t->begin(); row != t->end(); ++row) {
          script.embedding_table[row.key()] = row.value().get<std::vector<double>>();
        }
      }
    }
  } else {
    throw Error(ErrorCode::config_error, "mock script must be an array or object");
  }
  if (rules) {
    for (const auto& r : *rules) {
      ScriptRule rule;
      const Json& match = r.at("match");
      if (match.contains("request_tag_prefix")) rule.request_tag_prefix = match["request_tag_prefix"].get<std::string>();
      if (match.contains("prompt_substring")) rule.prompt_substring = match["prompt_substring"].get<std::string>();
      if (!rule.request_tag_prefix && !rule.prompt_substring) {
        throw Error(ErrorCode::config_error, "mock rule needs request_tag_prefix or prompt_substring");
      }
      if (r.contains("responses")) {
        rule.responses = r["responses"].get<std::vector<std::string>>();
      } else {
        rule.responses.push_back(r.at("response").get<std::string>());
      }
      if (rule.responses.empty()) throw Error(ErrorCode::config_error, "mock rule without a response");
      script.rules.push_back(std::move(rule));
    }
  }
  return script;
}

MockScript load_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open mock script " + path.string());
  try {
    return parse_mock_script(Json::parse(in));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::config_error, "mock script " + path.string() + ": " + e.what());
  }
}

Json mock_script_to_json(const MockScript& script) {
  Json rules = Json::array();
  for (const auto& r : script.rules) {
    Json match = Json::object();
    if (r.request_tag_prefix) match["request_tag_prefix"] = *r.request_tag_prefix;
    if (r.prompt_substring) match["prompt_substring"] = *r.prompt_substring;
    Json rule = {{"match", match}};
    if (r.responses.size() == 1) {
      rule["response"] = r.responses.front();
    } else {
      rule["responses"] = r.responses;
    }
    rules.push_back(std::move(rule));
  }
  Json table = Json::object();
  for (const auto& [k, v] : script.embedding_table) table[k] = v;
  return Json{{"rules", rules},
              {"embeddings",
               {{"model_id", script.embedding_model_id}, {"fallback_dim", script.fallback_dim}, {"table", table}}}};
}

std::unique_ptr<ScriptedChat> make_scripted_chat(const MockScript& script) {
  return std::make_unique<ScriptedChat>(script.rules);
}

std::unique_ptr<Embedder> make_mock_embedder(const MockScript& script) {
  std::shared_ptr<HashEmbedder> fallback;
  if (script.fallback_dim > 0) fallback = std::make_shared<HashEmbedder>(script.fallback_dim);
  return std::make_unique<TableEmbedder>(script.embedding_table, script.embedding_model_id, fallback);
}

}  // namespace rageval
