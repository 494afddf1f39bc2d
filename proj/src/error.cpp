#include "rageval/error.hpp"

namespace rageval {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::malformed_record: return "malformed_record";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::missing_field: return "missing_field";
    case ErrorCode::empty_field: return "empty_field";
    case ErrorCode::no_contexts: return "no_contexts";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::network_error: return "network_error";
    case ErrorCode::http_error: return "http_error";
    case ErrorCode::rate_limited: return "rate_limited";
    case ErrorCode::empty_completion: return "empty_completion";
    case ErrorCode::dim_mismatch: return "dim_mismatch";
    case ErrorCode::zero_vector: return "zero_vector";
    case ErrorCode::unmatched_request: return "unmatched_request";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::parse_failure: return "parse_failure";
    case ErrorCode::verdict_count_mismatch: return "verdict_count_mismatch";
    case ErrorCode::short_output: return "short_output";
    case ErrorCode::zero_sentence_context: return "zero_sentence_context";
    case ErrorCode::duplicate_chunk_id: return "duplicate_chunk_id";
    case ErrorCode::id_mismatch: return "id_mismatch";
    case ErrorCode::empty_runs: return "empty_runs";
    case ErrorCode::unresolved_sample_id: return "unresolved_sample_id";
    case ErrorCode::no_labels: return "no_labels";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::missing_inputs: return "missing_inputs";
    case ErrorCode::unwritable_output: return "unwritable_output";
    case ErrorCode::output_exists: return "output_exists";
    case ErrorCode::replay_divergence: return "replay_divergence";
  }
  return "unknown";
}

bool is_backend_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::network_error:
    case ErrorCode::http_error:
    case ErrorCode::rate_limited:
    case ErrorCode::empty_completion:
    case ErrorCode::dim_mismatch:
    case ErrorCode::zero_vector:
    case ErrorCode::unmatched_request:
    case ErrorCode::config_error:
      return true;
    default:
      return false;
  }
}

namespace {

std::string compose(ErrorCode code, const std::string& detail, std::optional<long> number) {
  std::string msg(to_string(code));
  if (number) msg += "(" + std::to_string(*number) + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string detail, std::optional<long> number)
    : std::runtime_error(compose(code, detail, number)),
      code_(code),
      detail_(std::move(detail)),
      number_(number) {}

}  // namespace rageval
