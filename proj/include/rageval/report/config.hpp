#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rageval/backends/cache.hpp"
#include "rageval/backends/chat.hpp"
#include "rageval/backends/embedding.hpp"
#include "rageval/core/json.hpp"
#include "rageval/core/types.hpp"
#include "rageval/metrics/engine.hpp"

namespace rageval {

// Settings for one evaluation run. Layered: built-in defaults, then a JSON
// config file, then command-line flags.
struct RunConfig {
  std::string backend = "mock";  // mock | openai
  std::optional<std::filesystem::path> mock_script;
  std::optional<std::string> base_url;
  std::string chat_model = "judge";
  std::string embedding_model = "text-embedding-3-small";
  std::vector<MetricName> metrics{kAllMetrics.begin(), kAllMetrics.end()};
  int answer_relevance_n = 3;
  QuestionMode question_mode = QuestionMode::per_call;
  MetricWeights weights;
  int parse_retries = 2;
  int concurrency = 4;
  int max_in_flight = 4;
  int max_tokens = 1024;
  std::optional<long> seed = 0;
  std::optional<std::filesystem::path> cache;
  std::optional<std::filesystem::path> prompts_dir;
  double theta_high = 0.7;
  double theta_low = 0.3;
  int http_max_attempts = 3;
  int http_timeout_seconds = 60;
  int http_base_delay_ms = 500;
  std::string label;  // row label in rendered tables; defaults to chat_model
};

// Setting name -> "default" | "config" | "flag" | "env".
using Provenance = std::map<std::string, std::string>;

// Every setting starts as "default".
Provenance default_provenance();

// Applies the keys present in `doc` over `config`. Relative paths resolve
// against `base_dir`. Errors: config_error (unknown key, bad value).
void apply_config_json(RunConfig& config, const Json& doc, const std::filesystem::path& base_dir,
                       Provenance* provenance = nullptr, const std::string& source = "config");

// Errors: io_error, config_error.
void apply_config_file(RunConfig& config, const std::filesystem::path& path, Provenance* provenance = nullptr);

Json config_to_json(const RunConfig& config);

// Errors: config_error for out-of-range values.
void validate_config(const RunConfig& config);

EngineOptions engine_options(const RunConfig& config);

std::vector<MetricName> parse_metric_list(const std::string& csv);

// Owns the backend chain built from a config (mock or HTTP, optionally
// behind the response cache).
struct Backends {
  std::vector<std::unique_ptr<ChatBackend>> chat_chain;  // innermost first
  std::unique_ptr<Embedder> embedder;
  std::shared_ptr<ResponseCache> cache;

  ChatBackend& chat() const { return *chat_chain.back(); }
};

// Errors: config_error (e.g. mock backend without a script), io_error.
Backends make_backends(const RunConfig& config);
// Embedder alone, for retrieval.
std::unique_ptr<Embedder> make_embedder(const RunConfig& config);

}  // namespace rageval
