#include "rageval/core/types.hpp"

namespace rageval {

std::string_view to_string(MetricName m) {
  switch (m) {
    case MetricName::faithfulness: return "faithfulness";
    case MetricName::answer_relevance: return "answer_relevance";
    case MetricName::context_relevance: return "context_relevance";
    case MetricName::answer_similarity: return "answer_similarity";
    case MetricName::factual_correctness: return "factual_correctness";
    case MetricName::answer_correctness: return "answer_correctness";
  }
  return "unknown";
}

std::optional<MetricName> parse_metric_name(std::string_view name) {
  for (MetricName m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view short_label(MetricName m) {
  switch (m) {
    case MetricName::faithfulness: return "FaiFul";
    case MetricName::answer_relevance: return "AnsRel";
    case MetricName::context_relevance: return "ConRel";
    case MetricName::answer_similarity: return "AnsSim";
    case MetricName::factual_correctness: return "FacCor";
    case MetricName::answer_correctness: return "AnsCor";
  }
  return "?";
}

bool needs_context(MetricName m) {
  return m == MetricName::faithfulness || m == MetricName::context_relevance;
}

std::string_view to_string(NullReason r) {
  switch (r) {
    case NullReason::no_statements: return "no_statements";
    case NullReason::parse_failure_exhausted: return "parse_failure_exhausted";
    case NullReason::backend_error: return "backend_error";
    case NullReason::empty_classification: return "empty_classification";
  }
  return "unknown";
}

std::optional<NullReason> parse_null_reason(std::string_view name) {
  for (NullReason r : {NullReason::no_statements, NullReason::parse_failure_exhausted,
                       NullReason::backend_error, NullReason::empty_classification}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

}  // namespace rageval
