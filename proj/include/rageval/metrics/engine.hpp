#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rageval/backends/chat.hpp"
#include "rageval/backends/embedding.hpp"
#include "rageval/core/types.hpp"
#include "rageval/metrics/formulas.hpp"
#include "rageval/metrics/parsers.hpp"
#include "rageval/metrics/prompts.hpp"
#include "rageval/metrics/traces.hpp"

namespace rageval {

struct EngineOptions {
  std::string chat_model = "judge";
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<long> seed;
  // Extra tries of the identical prompt after an unparseable completion.
  int parse_retries = 2;
  int answer_relevance_n = 3;
  QuestionMode question_mode = QuestionMode::per_call;
  MetricWeights weights;
};

// Joins retrieved contexts into the single judge context.
std::string join_contexts(const std::vector<std::string>& contexts);

// Computes the six metrics: prompt -> raw completion -> strict parse ->
// formula. Every exchange with the judge and every embedding lands in the
// result's trace, including on failure. Safe to share across threads when
// the backends are.
class MetricEngine {
 public:
  MetricEngine(ChatBackend& chat, Embedder& embedder, EngineOptions options = {},
               PromptLibrary prompts = PromptLibrary::defaults());

  const EngineOptions& options() const noexcept { return options_; }
  const PromptLibrary& prompts() const noexcept { return prompts_; }

  // --- individual judge steps; `trace` receives calls as they happen ---

  struct StatementExtraction {
    std::string prompt;
    std::string raw_completion;
    StatementSet statements;
  };
  StatementExtraction extract_statements(const std::string& question, const std::string& answer,
                                         const std::string& tag, TraceCommon& trace) const;

  struct Judgement {
    std::string prompt;
    std::string raw_completion;
    std::vector<Verdict> verdicts;
  };
  Judgement judge_statements(const std::string& context, const StatementSet& statements, const std::string& tag,
                             TraceCommon& trace) const;

  struct QuestionGeneration {
    std::string prompt;
    QuestionMode mode = QuestionMode::per_call;
    std::vector<std::string> raw_completions;
    std::vector<std::string> questions;
  };
  // Errors: parse_failure (per-call mode), short_output (single-completion
  // mode with fewer than n questions after retries).
  QuestionGeneration generate_questions(const std::string& answer, int n, const std::string& tag,
                                        TraceCommon& trace) const;

  struct ClassificationStep {
    std::string prompt;
    std::string raw_completion;
    parse::Classification lists;
  };
  ClassificationStep classify_tp_fp_fn(const std::string& question, const std::string& answer,
                                       const std::string& ground_truth, const std::string& tag,
                                       TraceCommon& trace) const;

  // --- metrics ---

  MetricResult faithfulness(const EvalSample& sample) const;
  MetricResult answer_relevance(const EvalSample& sample) const;
  MetricResult context_relevance(const EvalSample& sample) const;
  MetricResult answer_similarity(const EvalSample& sample) const;
  MetricResult factual_correctness(const EvalSample& sample) const;
  MetricResult answer_correctness(const EvalSample& sample) const;
  MetricResult answer_correctness(const EvalSample& sample, const MetricWeights& weights) const;

  MetricResult evaluate(MetricName metric, const EvalSample& sample) const;

 private:
  template <class Parse>
  auto ask(const PromptId template_id, const std::string& prompt, const std::string& tag, int sequence,
           TraceCommon& trace, Parse&& parse) const;

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts, TraceCommon& trace) const;
  void note_template(PromptId id, TraceCommon& trace) const;

  FactualCorrectnessTrace run_factual(const EvalSample& sample, MetricName tag_metric, std::optional<double>& value,
                                      std::optional<NullReason>& reason) const;
  AnswerSimilarityTrace run_similarity(const EvalSample& sample, std::optional<double>& value,
                                       std::optional<NullReason>& reason) const;

  ChatBackend& chat_;
  Embedder& embedder_;
  EngineOptions options_;
  PromptLibrary prompts_;
};

}  // namespace rageval
