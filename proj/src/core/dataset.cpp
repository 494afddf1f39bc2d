#include "rageval/core/dataset.hpp"

#include <fstream>
#include <unordered_set>

#include "rageval/core/text.hpp"
#include "rageval/error.hpp"

namespace rageval {

namespace {

const std::set<std::string> kKnownKeys = {
    "id", "question", "contexts", "generated_answer", "ground_truth", "retrieval_correct", "human_correct",
};

[[noreturn]] void malformed(long line_no, const std::string& why) {
  throw Error(ErrorCode::malformed_record, why, line_no);
}

std::string required_string(const Json& record, const char* key, long line_no, bool must_be_non_empty) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    if (!must_be_non_empty) return {};
    malformed(line_no, std::string("missing \"") + key + "\"");
  }
  if (!it->is_string()) malformed(line_no, std::string("\"") + key + "\" must be a string");
  std::string value = it->get<std::string>();
  if (must_be_non_empty && text::trim(value).empty()) {
    malformed(line_no, std::string("\"") + key + "\" is empty");
  }
  return value;
}

std::optional<bool> optional_bool(const Json& record, const char* key, long line_no) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_boolean()) malformed(line_no, std::string("\"") + key + "\" must be a boolean");
  return it->get<bool>();
}

}  // namespace

EvalSample parse_sample(const Json& record, long line_no, const LoadOptions& options) {
  if (!record.is_object()) malformed(line_no, "record is not an object");
  EvalSample s;
  s.id = required_string(record, "id", line_no, true);
  s.question = required_string(record, "question", line_no, true);
  s.generated_answer = required_string(record, "generated_answer", line_no, options.require_answers);
  s.ground_truth = required_string(record, "ground_truth", line_no, options.require_answers);

  if (auto it = record.find("contexts"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) malformed(line_no, "\"contexts\" must be an array");
    for (const auto& c : *it) {
      if (!c.is_string()) malformed(line_no, "\"contexts\" entries must be strings");
      s.contexts.push_back(c.get<std::string>());
    }
  }
  s.retrieval_correct = optional_bool(record, "retrieval_correct", line_no);
  s.human_correct = optional_bool(record, "human_correct", line_no);

  for (auto it = record.begin(); it != record.end(); ++it) {
    if (!kKnownKeys.contains(it.key())) s.extra[it.key()] = it.value();
  }
  return s;
}

Json sample_to_json(const EvalSample& s) {
  Json j = Json::object();
  j["id"] = s.id;
  j["question"] = s.question;
  j["contexts"] = s.contexts;
  j["generated_answer"] = s.generated_answer;
  j["ground_truth"] = s.ground_truth;
  if (s.retrieval_correct) j["retrieval_correct"] = *s.retrieval_correct;
  if (s.human_correct) j["human_correct"] = *s.human_correct;
  for (auto it = s.extra.begin(); it != s.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::vector<EvalSample> load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open dataset " + path.string());

  std::vector<EvalSample> samples;
  std::unordered_set<std::string> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      malformed(line_no, e.what());
    }
    EvalSample s = parse_sample(record, line_no, options);
    if (!seen.insert(s.id).second) throw Error(ErrorCode::duplicate_id, s.id);
    samples.push_back(std::move(s));
  }
  if (in.bad()) throw Error(ErrorCode::io_error, "read failed for " + path.string());
  return samples;
}

void write_dataset(const std::filesystem::path& path, std::span<const EvalSample> samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::unwritable_output, path.string());
  for (const auto& s : samples) out << sample_to_json(s).dump() << '\n';
  if (!out) throw Error(ErrorCode::unwritable_output, path.string());
}

const EvalSample& validate_sample(const EvalSample& s, const std::set<std::string>& required) {
  auto check_text = [&](const char* name, const std::string& value) {
    if (!required.contains(name)) return;
    if (text::trim(value).empty()) throw Error(ErrorCode::empty_field, name);
  };
  if (text::trim(s.id).empty()) throw Error(ErrorCode::empty_field, "id");
  check_text(field::question, s.question);
  check_text(field::generated_answer, s.generated_answer);
  check_text(field::ground_truth, s.ground_truth);
  if (required.contains(field::contexts)) {
    if (s.contexts.empty()) throw Error(ErrorCode::no_contexts, s.id);
    for (const auto& c : s.contexts) {
      if (text::trim(c).empty()) throw Error(ErrorCode::empty_field, field::contexts);
    }
  }
  if (required.contains(field::retrieval_correct) && !s.retrieval_correct) {
    throw Error(ErrorCode::missing_field, field::retrieval_correct);
  }
  if (required.contains(field::human_correct) && !s.human_correct) {
    throw Error(ErrorCode::missing_field, field::human_correct);
  }
  return s;
}

std::set<std::string> required_fields(std::span<const MetricName> metrics) {
  std::set<std::string> out = {field::question};
  for (MetricName m : metrics) {
    if (needs_context(m)) out.insert(field::contexts);
    if (m != MetricName::context_relevance) out.insert(field::generated_answer);
    if (m == MetricName::answer_similarity || m == MetricName::factual_correctness ||
        m == MetricName::answer_correctness) {
      out.insert(field::ground_truth);
    }
  }
  return out;
}

}  // namespace rageval
