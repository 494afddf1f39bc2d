#include "rageval/metrics/engine.hpp"

#include <algorithm>

#include "rageval/core/text.hpp"
#include "rageval/error.hpp"

namespace rageval {

namespace {

bool is_parse_error(ErrorCode c) {
  return c == ErrorCode::parse_failure || c == ErrorCode::verdict_count_mismatch || c == ErrorCode::short_output;
}

std::string tag_of(MetricName metric, const std::string& sample_id, std::string_view step) {
  return std::string(to_string(metric)) + ":" + sample_id + ":" + std::string(step);
}

// Maps a step failure onto the metric's null reason, recording it in the
// trace. Errors that are neither backend nor parse failures are rethrown.
NullReason absorb(const Error& e, TraceCommon& trace) {
  trace.error = ErrorRecord{std::string(to_string(e.code())), e.what()};
  if (is_backend_error(e.code())) return NullReason::backend_error;
  if (is_parse_error(e.code())) return NullReason::parse_failure_exhausted;
  throw e;
}

}  // namespace

std::string join_contexts(const std::vector<std::string>& contexts) { return text::join(contexts, "\n\n"); }

MetricEngine::MetricEngine(ChatBackend& chat, Embedder& embedder, EngineOptions options, PromptLibrary prompts)
    : chat_(chat), embedder_(embedder), options_(std::move(options)), prompts_(std::move(prompts)) {
  validate_weights(options_.weights);
  if (options_.parse_retries < 0) throw Error(ErrorCode::config_error, "parse_retries must be >= 0");
  if (options_.answer_relevance_n < 1) throw Error(ErrorCode::config_error, "answer_relevance_n must be >= 1");
}

void MetricEngine::note_template(PromptId id, TraceCommon& trace) const {
  const auto& t = prompts_.get(id);
  std::string name(to_string(id));
  bool seen = std::any_of(trace.templates.begin(), trace.templates.end(),
                          [&](const TemplateRef& r) { return r.name == name; });
  if (!seen) trace.templates.push_back({name, t.version, t.digest()});
}

// Issues `prompt` up to 1 + parse_retries times until `parse` accepts the
// completion. Backend errors propagate immediately.
template <class Parse>
auto MetricEngine::ask(const PromptId template_id, const std::string& prompt, const std::string& tag, int sequence,
                       TraceCommon& trace, Parse&& parse) const {
  note_template(template_id, trace);
  std::optional<Error> last;
  for (int attempt = 0; attempt <= options_.parse_retries; ++attempt) {
    ChatRequest req = make_user_request(options_.chat_model, prompt, tag);
    req.temperature = options_.temperature;
    req.max_tokens = options_.max_tokens;
    req.seed = options_.seed;
    req.sequence = sequence;
    req.attempt = attempt;
    std::string completion = chat_.complete(req);
    trace.calls.push_back({tag, sequence, attempt, prompt, completion});
    try {
      return std::make_pair(parse(completion), completion);
    } catch (const Error& e) {
      if (!is_parse_error(e.code())) throw;
      last = e;
    }
  }
  throw *last;
}

std::vector<EmbeddingVector> MetricEngine::embed(const std::vector<std::string>& texts, TraceCommon& trace) const {
  auto vectors = embedder_.embed(texts);
  for (std::size_t i = 0; i < texts.size(); ++i) trace.embeddings.push_back({texts[i], vectors[i]});
  return vectors;
}

MetricEngine::StatementExtraction MetricEngine::extract_statements(const std::string& question,
                                                                   const std::string& answer,
                                                                   const std::string& tag,
                                                                   TraceCommon& trace) const {
  if (text::trim(question).empty() || text::trim(answer).empty()) {
    throw Error(ErrorCode::precondition, "statement extraction needs a question and an answer");
  }
  StatementExtraction out;
  out.prompt = prompts_.get(PromptId::statement_extraction).render({{"question", question}, {"answer", answer}});
  auto [stmts, raw] = ask(PromptId::statement_extraction, out.prompt, tag, 0, trace,
                          [](const std::string& c) { return parse::statements(c); });
  out.raw_completion = std::move(raw);
  out.statements = StatementSet{std::move(stmts), StatementSource::from_answer};
  return out;
}

MetricEngine::Judgement MetricEngine::judge_statements(const std::string& context, const StatementSet& statements,
                                                       const std::string& tag, TraceCommon& trace) const {
  const auto n = statements.statements.size();
  if (n == 0) throw Error(ErrorCode::precondition, "no statements to judge");
  std::vector<std::string> lines;
  for (const auto& s : statements.statements) lines.push_back("statement: " + s);
  Judgement out;
  out.prompt = prompts_.get(PromptId::statement_verdicts)
                   .render({{"context", context}, {"statements", text::join(lines, "\n")}});
  auto [parsed, raw] = ask(PromptId::statement_verdicts, out.prompt, tag, 0, trace,
                           [n](const std::string& c) { return parse::verdicts(c, n); });
  out.raw_completion = std::move(raw);
  for (std::size_t i = 0; i < n; ++i) {
    out.verdicts.push_back({statements.statements[i], parsed[i].supported, parsed[i].explanation});
  }
  return out;
}

MetricEngine::QuestionGeneration MetricEngine::generate_questions(const std::string& answer, int n,
                                                                  const std::string& tag,
                                                                  TraceCommon& trace) const {
  if (text::trim(answer).empty()) throw Error(ErrorCode::precondition, "question generation needs an answer");
  if (n < 1) throw Error(ErrorCode::precondition, "question count must be >= 1");
  QuestionGeneration out;
  out.mode = options_.question_mode;

  if (out.mode == QuestionMode::single_completion) {
    out.prompt = prompts_.get(PromptId::question_list).render({{"answer", answer}, {"n", std::to_string(n)}});
    const auto want = static_cast<std::size_t>(n);
    auto [qs, raw] = ask(PromptId::question_list, out.prompt, tag, 0, trace, [want](const std::string& c) {
      auto parsed = parse::questions(c);
      if (parsed.size() < want) {
        throw Error(ErrorCode::short_output,
                    "expected " + std::to_string(want) + " questions, got " + std::to_string(parsed.size()));
      }
      parsed.resize(want);
      return parsed;
    });
    out.raw_completions.push_back(std::move(raw));
    out.questions = std::move(qs);
    return out;
  }

  out.prompt = prompts_.get(PromptId::question_generation).render({{"answer", answer}});
  for (int i = 0; i < n; ++i) {
    auto [qs, raw] = ask(PromptId::question_generation, out.prompt, tag + ":" + std::to_string(i), i, trace,
                         [](const std::string& c) { return parse::questions(c); });
    out.raw_completions.push_back(std::move(raw));
    out.questions.push_back(std::move(qs.front()));
  }
  return out;
}

MetricEngine::ClassificationStep MetricEngine::classify_tp_fp_fn(const std::string& question,
                                                                 const std::string& answer,
                                                                 const std::string& ground_truth,
                                                                 const std::string& tag, TraceCommon& trace) const {
  if (text::trim(question).empty() || text::trim(answer).empty() || text::trim(ground_truth).empty()) {
    throw Error(ErrorCode::precondition, "classification needs question, answer and ground truth");
  }
  ClassificationStep out;
  out.prompt = prompts_.get(PromptId::factual_classification)
                   .render({{"question", question}, {"answer", answer}, {"ground_truth", ground_truth}});
  auto [lists, raw] = ask(PromptId::factual_classification, out.prompt, tag, 0, trace,
                          [](const std::string& c) { return parse::classification(c); });
  out.raw_completion = std::move(raw);
  out.lists = std::move(lists);
  return out;
}

MetricResult MetricEngine::faithfulness(const EvalSample& sample) const {
  if (sample.contexts.empty()) throw Error(ErrorCode::no_contexts, sample.id);
  MetricResult r{MetricName::faithfulness, sample.id, std::nullopt, std::nullopt, FaithfulnessTrace{}};
  auto& trace = std::get<FaithfulnessTrace>(r.trace);
  try {
    auto extraction = extract_statements(sample.question, sample.generated_answer,
                                         tag_of(r.metric, sample.id, "statements"), trace);
    trace.statement_extraction_prompt = extraction.prompt;
    trace.raw_statement_completion = extraction.raw_completion;
    trace.statements = extraction.statements;
    trace.total_count = extraction.statements.statements.size();
    if (trace.total_count == 0) {
      r.null_reason = NullReason::no_statements;
      return r;
    }
    auto judgement = judge_statements(join_contexts(sample.contexts), extraction.statements,
                                      tag_of(r.metric, sample.id, "verdicts"), trace);
    trace.verdict_prompt = judgement.prompt;
    trace.raw_verdict_completion = judgement.raw_completion;
    trace.verdicts = judgement.verdicts;
    trace.supported_count = static_cast<std::size_t>(
        std::count_if(trace.verdicts.begin(), trace.verdicts.end(), [](const Verdict& v) { return v.supported; }));
    r.value = faithfulness_score(trace.supported_count, trace.total_count);
  } catch (const Error& e) {
    r.null_reason = absorb(e, trace);
    // Keep the last raw exchange of the failing step visible in the typed fields.
    if (!trace.calls.empty()) {
      const auto& last = trace.calls.back();
      if (last.request_tag.ends_with(":statements")) {
        trace.statement_extraction_prompt = last.prompt;
        trace.raw_statement_completion = last.completion;
      } else {
        trace.verdict_prompt = last.prompt;
        trace.raw_verdict_completion = last.completion;
      }
    }
  }
  return r;
}

MetricResult MetricEngine::answer_relevance(const EvalSample& sample) const {
  MetricResult r{MetricName::answer_relevance, sample.id, std::nullopt, std::nullopt, AnswerRelevanceTrace{}};
  auto& trace = std::get<AnswerRelevanceTrace>(r.trace);
  trace.mode = options_.question_mode;
  try {
    auto gen = generate_questions(sample.generated_answer, options_.answer_relevance_n,
                                  tag_of(r.metric, sample.id,
                                         options_.question_mode == QuestionMode::per_call ? "question" : "questions"),
                                  trace);
    trace.question_generation_prompt = gen.prompt;
    trace.raw_completions = gen.raw_completions;
    trace.generated_questions = gen.questions;

    std::vector<std::string> texts{sample.question};
    texts.insert(texts.end(), gen.questions.begin(), gen.questions.end());
    auto vectors = embed(texts, trace);
    for (std::size_t i = 1; i < vectors.size(); ++i) {
      trace.per_question_similarity.push_back(cosine_similarity(vectors[0], vectors[i]));
    }
    trace.mean_similarity = answer_relevance_score(trace.per_question_similarity);
    r.value = trace.mean_similarity;
  } catch (const Error& e) {
    r.null_reason = absorb(e, trace);
    if (trace.question_generation_prompt.empty() && !trace.calls.empty()) {
      trace.question_generation_prompt = trace.calls.back().prompt;
    }
    if (trace.raw_completions.empty()) {
      for (const auto& c : trace.calls) trace.raw_completions.push_back(c.completion);
    }
  }
  return r;
}

MetricResult MetricEngine::context_relevance(const EvalSample& sample) const {
  if (sample.contexts.empty()) throw Error(ErrorCode::no_contexts, sample.id);
  MetricResult r{MetricName::context_relevance, sample.id, std::nullopt, std::nullopt, ContextRelevanceTrace{}};
  auto& trace = std::get<ContextRelevanceTrace>(r.trace);

  const std::string context = join_contexts(sample.contexts);
  trace.context_sentence_count = text::split_sentences(context).count();
  if (trace.context_sentence_count == 0) throw Error(ErrorCode::zero_sentence_context, sample.id);

  trace.extraction_prompt =
      prompts_.get(PromptId::context_extraction).render({{"question", sample.question}, {"context", context}});
  try {
    auto [extraction, raw] =
        ask(PromptId::context_extraction, trace.extraction_prompt, tag_of(r.metric, sample.id, "extraction"), 0,
            trace, [](const std::string& c) { return parse::context_extraction(c); });
    trace.raw_completion = std::move(raw);
    trace.insufficient_information = extraction.insufficient_information;
    if (trace.insufficient_information) {
      r.value = 0.0;
      return r;
    }
    trace.extracted_sentences = std::move(extraction.sentences);
    const std::string normalized_context = text::normalize_whitespace(context);
    for (const auto& s : trace.extracted_sentences) {
      if (normalized_context.find(text::normalize_whitespace(s)) == std::string::npos) {
        ++trace.non_verbatim_count;
        trace.non_verbatim_sentences.push_back(s);
      }
    }
    auto score = context_relevance_score(trace.extracted_sentences.size(), trace.context_sentence_count);
    trace.capped = score.capped;
    r.value = score.value;
  } catch (const Error& e) {
    r.null_reason = absorb(e, trace);
    if (!trace.calls.empty()) trace.raw_completion = trace.calls.back().completion;
  }
  return r;
}

AnswerSimilarityTrace MetricEngine::run_similarity(const EvalSample& sample, std::optional<double>& value,
                                                   std::optional<NullReason>& reason) const {
  AnswerSimilarityTrace trace;
  try {
    auto vectors = embed({sample.generated_answer, sample.ground_truth}, trace);
    trace.answer_model_id = vectors[0].model_id;
    trace.ground_truth_model_id = vectors[1].model_id;
    trace.raw_similarity = cosine_similarity(vectors[0], vectors[1]);
    value = clamp01(*trace.raw_similarity);
  } catch (const Error& e) {
    reason = absorb(e, trace);
  }
  return trace;
}

FactualCorrectnessTrace MetricEngine::run_factual(const EvalSample& sample, MetricName tag_metric,
                                                  std::optional<double>& value,
                                                  std::optional<NullReason>& reason) const {
  FactualCorrectnessTrace trace;
  try {
    auto step = classify_tp_fp_fn(sample.question, sample.generated_answer, sample.ground_truth,
                                  tag_of(tag_metric, sample.id, "classification"), trace);
    trace.classification_prompt = step.prompt;
    trace.raw_completion = step.raw_completion;
    trace.tp = std::move(step.lists.tp);
    trace.fp = std::move(step.lists.fp);
    trace.fn = std::move(step.lists.fn);
    trace.duplicates_dropped = step.lists.duplicates_dropped;
    value = factual_correctness_score(trace.tp.size(), trace.fp.size(), trace.fn.size());
    if (!value) reason = NullReason::empty_classification;
  } catch (const Error& e) {
    reason = absorb(e, trace);
    if (!trace.calls.empty()) {
      trace.classification_prompt = trace.calls.back().prompt;
      trace.raw_completion = trace.calls.back().completion;
    }
  }
  return trace;
}

MetricResult MetricEngine::answer_similarity(const EvalSample& sample) const {
  MetricResult r{MetricName::answer_similarity, sample.id, std::nullopt, std::nullopt, AnswerSimilarityTrace{}};
  r.trace = run_similarity(sample, r.value, r.null_reason);
  return r;
}

MetricResult MetricEngine::factual_correctness(const EvalSample& sample) const {
  MetricResult r{MetricName::factual_correctness, sample.id, std::nullopt, std::nullopt, FactualCorrectnessTrace{}};
  r.trace = run_factual(sample, r.metric, r.value, r.null_reason);
  return r;
}

MetricResult MetricEngine::answer_correctness(const EvalSample& sample) const {
  return answer_correctness(sample, options_.weights);
}

MetricResult MetricEngine::answer_correctness(const EvalSample& sample, const MetricWeights& weights) const {
  validate_weights(weights);
  MetricResult r{MetricName::answer_correctness, sample.id, std::nullopt, std::nullopt, AnswerCorrectnessTrace{}};
  auto& trace = std::get<AnswerCorrectnessTrace>(r.trace);
  trace.weights = weights;
  trace.factual.trace = run_factual(sample, r.metric, trace.factual.value, trace.factual.null_reason);
  trace.similarity.trace = run_similarity(sample, trace.similarity.value, trace.similarity.null_reason);
  if (trace.factual.null_reason) {
    r.null_reason = trace.factual.null_reason;
  } else if (trace.similarity.null_reason) {
    r.null_reason = trace.similarity.null_reason;
  } else {
    r.value = answer_correctness_score(*trace.factual.value, *trace.similarity.value, weights);
  }
  return r;
}

MetricResult MetricEngine::evaluate(MetricName metric, const EvalSample& sample) const {
  switch (metric) {
    case MetricName::faithfulness: return faithfulness(sample);
    case MetricName::answer_relevance: return answer_relevance(sample);
    case MetricName::context_relevance: return context_relevance(sample);
    case MetricName::answer_similarity: return answer_similarity(sample);
    case MetricName::factual_correctness: return factual_correctness(sample);
    case MetricName::answer_correctness: return answer_correctness(sample);
  }
  throw Error(ErrorCode::precondition, "unknown metric");
}

}  // namespace rageval
