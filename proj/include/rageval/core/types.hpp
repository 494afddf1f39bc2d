#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rageval/core/json.hpp"

namespace rageval {

// One QA record from the RAG pipeline under evaluation.
struct EvalSample {
  std::string id;
  std::string question;
  std::vector<std::string> contexts;
  std::string generated_answer;
  std::string ground_truth;
  std::optional<bool> retrieval_correct;
  std::optional<bool> human_correct;
  // Keys outside the schema, echoed back unchanged on emit.
  Json extra = Json::object();

  bool operator==(const EvalSample&) const = default;
};

enum class MetricName {
  faithfulness,
  answer_relevance,
  context_relevance,
  answer_similarity,
  factual_correctness,
  answer_correctness,
};

inline constexpr std::array<MetricName, 6> kAllMetrics = {
    MetricName::faithfulness,        MetricName::answer_relevance,
    MetricName::context_relevance,   MetricName::answer_similarity,
    MetricName::factual_correctness, MetricName::answer_correctness,
};

std::string_view to_string(MetricName m);
std::optional<MetricName> parse_metric_name(std::string_view name);
// Short column label used in rendered tables ("FaiFul", "FacCor", ...).
std::string_view short_label(MetricName m);
// Whether the metric reads the retrieved context(s).
bool needs_context(MetricName m);

enum class NullReason {
  no_statements,
  parse_failure_exhausted,
  backend_error,
  empty_classification,
};

std::string_view to_string(NullReason r);
std::optional<NullReason> parse_null_reason(std::string_view name);

// Ordered sentences of a text after whitespace normalization.
struct SentenceList {
  std::string source_text;
  std::vector<std::string> sentences;

  std::size_t count() const noexcept { return sentences.size(); }
};

}  // namespace rageval
