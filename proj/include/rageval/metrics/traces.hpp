#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rageval/backends/chat.hpp"
#include "rageval/backends/embedding.hpp"
#include "rageval/core/json.hpp"
#include "rageval/core/types.hpp"
#include "rageval/metrics/formulas.hpp"

namespace rageval {

enum class StatementSource { from_answer, from_ground_truth };

struct StatementSet {
  std::vector<std::string> statements;
  StatementSource source = StatementSource::from_answer;
};

struct Verdict {
  std::string statement;
  bool supported = false;
  std::string explanation;
};

struct TemplateRef {
  std::string name;
  std::string version;
  std::string digest;
};

struct EmbeddingRecord {
  std::string text;
  EmbeddingVector vector;
};

struct ErrorRecord {
  std::string code;
  std::string message;
};

// Fields shared by every trace: templates used, every exchange with the
// judge, every embedding fetched, and the failure (if any).
struct TraceCommon {
  std::vector<TemplateRef> templates;
  std::vector<ChatExchange> calls;
  std::vector<EmbeddingRecord> embeddings;
  std::optional<ErrorRecord> error;
};

struct FaithfulnessTrace : TraceCommon {
  std::string statement_extraction_prompt;
  std::string raw_statement_completion;
  StatementSet statements;
  std::string verdict_prompt;
  std::string raw_verdict_completion;
  std::vector<Verdict> verdicts;
  std::size_t supported_count = 0;
  std::size_t total_count = 0;
};

enum class QuestionMode { per_call, single_completion };
std::string_view to_string(QuestionMode m);
std::optional<QuestionMode> parse_question_mode(std::string_view s);

struct AnswerRelevanceTrace : TraceCommon {
  QuestionMode mode = QuestionMode::per_call;
  std::string question_generation_prompt;
  std::vector<std::string> raw_completions;
  std::vector<std::string> generated_questions;
  std::vector<double> per_question_similarity;  // raw cosine
  double mean_similarity = 0.0;                 // mean of clamped values
};

struct ContextRelevanceTrace : TraceCommon {
  std::string extraction_prompt;
  std::string raw_completion;
  std::vector<std::string> extracted_sentences;
  bool insufficient_information = false;
  std::size_t context_sentence_count = 0;
  std::size_t non_verbatim_count = 0;
  std::vector<std::string> non_verbatim_sentences;
  bool capped = false;
};

struct AnswerSimilarityTrace : TraceCommon {
  std::optional<double> raw_similarity;
  std::string answer_model_id;
  std::string ground_truth_model_id;
};

struct FactualCorrectnessTrace : TraceCommon {
  std::string classification_prompt;
  std::string raw_completion;
  std::vector<std::string> tp;
  std::vector<std::string> fp;
  std::vector<std::string> fn;
  std::size_t duplicates_dropped = 0;
};

template <class Trace>
struct SubMetric {
  std::optional<double> value;
  std::optional<NullReason> null_reason;
  Trace trace;
};

struct AnswerCorrectnessTrace {
  MetricWeights weights;
  SubMetric<FactualCorrectnessTrace> factual;
  SubMetric<AnswerSimilarityTrace> similarity;
};

using MetricTrace = std::variant<FaithfulnessTrace, AnswerRelevanceTrace, ContextRelevanceTrace,
                                 AnswerSimilarityTrace, FactualCorrectnessTrace, AnswerCorrectnessTrace>;

struct MetricResult {
  MetricName metric = MetricName::faithfulness;
  std::string sample_id;
  std::optional<double> value;
  std::optional<NullReason> null_reason;
  MetricTrace trace;
};

Json trace_to_json(const MetricTrace& trace);

// {"sample_id","metric","value"[,"null_reason"]}
Json score_record(const MetricResult& r);
// {"sample_id","metric","trace":{...}}
Json trace_record(const MetricResult& r);

// Every judge exchange / embedding inside a serialized trace, including
// nested sub-metric traces.
std::vector<ChatExchange> collect_exchanges(const Json& trace);
std::vector<EmbeddingRecord> collect_embeddings(const Json& trace);

}  // namespace rageval
