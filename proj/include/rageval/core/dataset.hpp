#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rageval/core/json.hpp"
#include "rageval/core/types.hpp"

namespace rageval {

struct LoadOptions {
  // When false, generated_answer and ground_truth may be absent or empty
  // (question files fed to the retriever before generation).
  bool require_answers = true;
};

// Parses one JSONL record. `line_no` is 1-based and only used in errors.
EvalSample parse_sample(const Json& record, long line_no, const LoadOptions& options = {});
Json sample_to_json(const EvalSample& sample);

// Reads a JSONL dataset in file order. Blank lines are skipped.
// Errors: io_error, malformed_record(line_no), duplicate_id(id).
std::vector<EvalSample> load_dataset(const std::filesystem::path& path,
                                     const LoadOptions& options = {});

void write_dataset(const std::filesystem::path& path, std::span<const EvalSample> samples);

// Field names accepted by validate_sample.
namespace field {
inline constexpr const char* question = "question";
inline constexpr const char* contexts = "contexts";
inline constexpr const char* generated_answer = "generated_answer";
inline constexpr const char* ground_truth = "ground_truth";
inline constexpr const char* retrieval_correct = "retrieval_correct";
inline constexpr const char* human_correct = "human_correct";
}  // namespace field

// Returns the sample unchanged when every required field is present and
// non-empty. Errors: missing_field(name), empty_field(name), no_contexts.
const EvalSample& validate_sample(const EvalSample& sample, const std::set<std::string>& required);

// Fields a set of metrics needs (contexts only for context-reading metrics).
std::set<std::string> required_fields(std::span<const MetricName> metrics);

}  // namespace rageval
