#include "rageval/metrics/traces.hpp"

namespace rageval {

std::string_view to_string(QuestionMode m) {
  return m == QuestionMode::per_call ? "per_call" : "single_completion";
}

std::optional<QuestionMode> parse_question_mode(std::string_view s) {
  if (s == "per_call") return QuestionMode::per_call;
  if (s == "single_completion") return QuestionMode::single_completion;
  return std::nullopt;
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void put_common(Json& j, const TraceCommon& c) {
  Json templates = Json::array();
  for (const auto& t : c.templates) {
    templates.push_back({{"name", t.name}, {"version", t.version}, {"digest", t.digest}});
  }
  Json calls = Json::array();
  for (const auto& e : c.calls) {
    calls.push_back({{"request_tag", e.request_tag},
                     {"sequence", e.sequence},
                     {"attempt", e.attempt},
                     {"prompt", e.prompt},
                     {"completion", e.completion}});
  }
  Json embeddings = Json::array();
  for (const auto& e : c.embeddings) {
    embeddings.push_back({{"text", e.text}, {"model_id", e.vector.model_id}, {"values", e.vector.values}});
  }
  j["templates"] = std::move(templates);
  j["calls"] = std::move(calls);
  j["embeddings"] = std::move(embeddings);
  j["error"] = c.error ? Json{{"code", c.error->code}, {"message", c.error->message}} : Json(nullptr);
}

Json to_json(const FaithfulnessTrace& t) {
  Json verdicts = Json::array();
  for (const auto& v : t.verdicts) {
    verdicts.push_back({{"statement", v.statement}, {"supported", v.supported}, {"explanation", v.explanation}});
  }
  Json j = Json::object();
  j["statement_extraction_prompt"] = t.statement_extraction_prompt;
  j["raw_statement_completion"] = t.raw_statement_completion;
  j["statements"] = t.statements.statements;
  j["statement_source"] = t.statements.source == StatementSource::from_answer ? "from_answer" : "from_ground_truth";
  j["verdict_prompt"] = t.verdict_prompt;
  j["raw_verdict_completion"] = t.raw_verdict_completion;
  j["verdicts"] = std::move(verdicts);
  j["supported_count"] = t.supported_count;
  j["total_count"] = t.total_count;
  put_common(j, t);
  return j;
}

Json to_json(const AnswerRelevanceTrace& t) {
  Json j = Json::object();
  j["generation_mode"] = to_string(t.mode);
  j["question_generation_prompt"] = t.question_generation_prompt;
  j["raw_completions"] = t.raw_completions;
  j["generated_questions"] = t.generated_questions;
  j["per_question_similarity"] = t.per_question_similarity;
  j["mean_similarity"] = t.mean_similarity;
  put_common(j, t);
  return j;
}

Json to_json(const ContextRelevanceTrace& t) {
  Json j = Json::object();
  j["extraction_prompt"] = t.extraction_prompt;
  j["raw_completion"] = t.raw_completion;
  j["extracted_sentences"] = t.extracted_sentences;
  j["insufficient_information"] = t.insufficient_information;
  j["context_sentence_count"] = t.context_sentence_count;
  j["non_verbatim_count"] = t.non_verbatim_count;
  j["non_verbatim_sentences"] = t.non_verbatim_sentences;
  j["capped"] = t.capped;
  put_common(j, t);
  return j;
}

Json to_json(const AnswerSimilarityTrace& t) {
  Json j = Json::object();
  j["raw_similarity"] = optional_number(t.raw_similarity);
  j["answer_model_id"] = t.answer_model_id;
  j["ground_truth_model_id"] = t.ground_truth_model_id;
  put_common(j, t);
  return j;
}

Json to_json(const FactualCorrectnessTrace& t) {
  Json j = Json::object();
  j["classification_prompt"] = t.classification_prompt;
  j["raw_completion"] = t.raw_completion;
  j["tp"] = t.tp;
  j["fp"] = t.fp;
  j["fn"] = t.fn;
  j["counts"] = {{"tp", t.tp.size()}, {"fp", t.fp.size()}, {"fn", t.fn.size()}};
  j["duplicates_dropped"] = t.duplicates_dropped;
  put_common(j, t);
  return j;
}

template <class Trace>
Json sub_to_json(const SubMetric<Trace>& s) {
  Json j = Json::object();
  j["value"] = optional_number(s.value);
  j["null_reason"] = s.null_reason ? Json(to_string(*s.null_reason)) : Json(nullptr);
  j["trace"] = to_json(s.trace);
  return j;
}

Json to_json(const AnswerCorrectnessTrace& t) {
  Json j = Json::object();
  j["weights"] = {{"w_factual", t.weights.w_factual}, {"w_similarity", t.weights.w_similarity}};
  j["factual_correctness"] = sub_to_json(t.factual);
  j["answer_similarity"] = sub_to_json(t.similarity);
  return j;
}

void walk(const Json& j, std::vector<ChatExchange>* calls, std::vector<EmbeddingRecord>* embeddings) {
  if (!j.is_object()) return;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "calls" && it->is_array() && calls) {
      for (const auto& c : *it) {
        calls->push_back({c.at("request_tag").get<std::string>(), c.at("sequence").get<int>(),
                          c.at("attempt").get<int>(), c.at("prompt").get<std::string>(),
                          c.at("completion").get<std::string>()});
      }
    } else if (it.key() == "embeddings" && it->is_array() && embeddings) {
      for (const auto& e : *it) {
        embeddings->push_back({e.at("text").get<std::string>(),
                               {e.at("values").get<std::vector<double>>(), e.at("model_id").get<std::string>()}});
      }
    } else if (it->is_object()) {
      walk(*it, calls, embeddings);
    }
  }
}

}  // namespace

Json trace_to_json(const MetricTrace& trace) {
  return std::visit([](const auto& t) { return to_json(t); }, trace);
}

Json score_record(const MetricResult& r) {
  Json j = Json::object();
  j["sample_id"] = r.sample_id;
  j["metric"] = to_string(r.metric);
  j["value"] = optional_number(r.value);
  if (r.null_reason) j["null_reason"] = to_string(*r.null_reason);
  return j;
}

Json trace_record(const MetricResult& r) {
  Json j = Json::object();
  j["sample_id"] = r.sample_id;
  j["metric"] = to_string(r.metric);
  j["trace"] = trace_to_json(r.trace);
  return j;
}

std::vector<ChatExchange> collect_exchanges(const Json& trace) {
  std::vector<ChatExchange> out;
  walk(trace, &out, nullptr);
  return out;
}

std::vector<EmbeddingRecord> collect_embeddings(const Json& trace) {
  std::vector<EmbeddingRecord> out;
  walk(trace, nullptr, &out);
  return out;
}

}  // namespace rageval
