#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rageval {

enum class ErrorCode {
  // core
  io_error,
  malformed_record,
  duplicate_id,
  missing_field,
  empty_field,
  no_contexts,
  precondition,
  // backends
  network_error,
  http_error,
  rate_limited,
  empty_completion,
  dim_mismatch,
  zero_vector,
  unmatched_request,
  config_error,
  // metrics
  parse_failure,
  verdict_count_mismatch,
  short_output,
  zero_sentence_context,
  // retriever
  duplicate_chunk_id,
  id_mismatch,
  empty_runs,
  // analysis
  unresolved_sample_id,
  no_labels,
  insufficient_data,
  // report / cli
  missing_inputs,
  unwritable_output,
  output_exists,
  replay_divergence,
};

std::string_view to_string(ErrorCode code);

// True for failures of the judge/embedding provider (as opposed to bad
// input or unparseable judge output).
bool is_backend_error(ErrorCode code);

// Errors raised by every module. `detail` carries the payload named in the
// error signature (a field name, an id, a status code).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, std::optional<long> number = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  // Line number for malformed_record, HTTP status for http_error.
  std::optional<long> number() const noexcept { return number_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<long> number_;
};

}  // namespace rageval
