#include "rageval/metrics/prompts.hpp"

#include <fstream>
#include <iterator>

#include "rageval/core/digest.hpp"
#include "rageval/error.hpp"

namespace rageval {

namespace {

constexpr std::string_view kBuiltinVersion = "builtin-1";

constexpr std::string_view kStatementExtraction =
    "Given a question and answer, create one or more statements from each sentence in the given answer.\n"
    "question: {question}\n"
    "answer: {answer}";

constexpr std::string_view kStatementVerdicts =
    "Consider the given context and following statements, then determine whether they are supported by the "
    "information present in the context. Provide a brief explanation for each statement before arriving at the "
    "verdict (Yes/No). Provide a final verdict for each statement in order at the end in the given format. Do not "
    "deviate from the specified format.\n"
    "context: {context}\n"
    "{statements}";

constexpr std::string_view kQuestionGeneration =
    "Generate a question for the given answer.\n"
    "answer: {answer}";

// Single-completion variant: the same instruction asking for {n} questions.
constexpr std::string_view kQuestionList =
    "Generate a question for the given answer.\n"
    "answer: {answer}\n"
    "Generate {n} different questions as a numbered list, one question per line.";

constexpr std::string_view kContextExtraction =
    "Please extract relevant sentences from the provided context that can potentially help answer the following "
    "question. If no relevant sentences are found, or if you believe the question cannot be answered from the given "
    "context, return the phrase \"Insufficient Information\". While extracting candidate sentences you’re not "
    "allowed to make any changes to sentences from given context.\n"
    "question: {question}\n"
    "context: {context}";

constexpr std::string_view kFactualClassification =
    "Extract following from given question and ground truth.\n"
    "\"TP\": statements that are present in both the answer and the ground truth,"
    "\"FP\": statements present in the answer but not found in the ground truth,"
    "\"FN\": relevant statements found in the ground truth but omitted in the answer.\n"
    "\n"
    "question: {question},\n"
    "\n"
    "answer: {answer},\n"
    "\n"
    "ground truth: {ground_truth},\n"
    "\n"
    "Extracted statements: {\n"
    "    \"TP\": [statement 1, statement 4, ...],\n"
    "    \"FP\": [statement 2, ...],\n"
    "    \"FN\": [statement 3, statement 5, statement 6, ...]\n"
    "}";

constexpr PromptId kIds[] = {
    PromptId::statement_extraction, PromptId::statement_verdicts,  PromptId::question_generation,
    PromptId::question_list,        PromptId::context_extraction, PromptId::factual_classification,
};

}  // namespace

std::string_view to_string(PromptId id) {
  switch (id) {
    case PromptId::statement_extraction: return "statement_extraction";
    case PromptId::statement_verdicts: return "statement_verdicts";
    case PromptId::question_generation: return "question_generation";
    case PromptId::question_list: return "question_list";
    case PromptId::context_extraction: return "context_extraction";
    case PromptId::factual_classification: return "factual_classification";
  }
  return "unknown";
}

std::string PromptTemplate::digest() const { return sha256_hex(text); }

std::string PromptTemplate::render(const std::map<std::string, std::string>& vars) const {
  std::string out;
  out.reserve(text.size() * 2);
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      auto close = text.find('}', i + 1);
      if (close != std::string::npos) {
        auto it = vars.find(text.substr(i + 1, close - i - 1));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

PromptLibrary PromptLibrary::defaults() {
  PromptLibrary lib;
  auto add = [&](PromptId id, std::string_view text) {
    lib.templates_[id] = PromptTemplate{id, std::string(text), std::string(kBuiltinVersion)};
  };
  add(PromptId::statement_extraction, kStatementExtraction);
  add(PromptId::statement_verdicts, kStatementVerdicts);
  add(PromptId::question_generation, kQuestionGeneration);
  add(PromptId::question_list, kQuestionList);
  add(PromptId::context_extraction, kContextExtraction);
  add(PromptId::factual_classification, kFactualClassification);
  return lib;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::io_error, "no template directory " + dir.string());
  PromptLibrary lib = defaults();
  for (PromptId id : kIds) {
    auto file = dir / (std::string(to_string(id)) + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) continue;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    lib.templates_[id] = PromptTemplate{id, std::move(text), "file:" + file.filename().string()};
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(PromptId id) const { return templates_.at(id); }

std::vector<const PromptTemplate*> PromptLibrary::all() const {
  std::vector<const PromptTemplate*> out;
  for (const auto& [id, t] : templates_) out.push_back(&t);
  return out;
}

}  // namespace rageval
