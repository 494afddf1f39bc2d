#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rageval/backends/chat.hpp"
#include "rageval/backends/embedding.hpp"
#include "rageval/core/json.hpp"
#include "rageval/core/types.hpp"
#include "rageval/metrics/traces.hpp"
#include "rageval/report/config.hpp"

namespace rageval {

// Run directory file names.
namespace run_files {
inline constexpr const char* manifest = "manifest.json";
inline constexpr const char* dataset = "dataset.jsonl";
inline constexpr const char* scores = "scores.jsonl";
inline constexpr const char* traces = "traces.jsonl";
inline constexpr const char* calls = "backend_calls.jsonl";
inline constexpr const char* tables = "tables";
inline constexpr const char* analysis = "analysis";
}  // namespace run_files

struct RunOptions {
  bool force = false;  // overwrite an existing run directory's outputs
  std::string dataset_source;  // recorded in the manifest
};

struct RunSummary {
  std::filesystem::path dir;
  std::string run_id;
  std::size_t samples = 0;
  std::size_t records = 0;
  std::size_t nulls = 0;
  std::size_t backend_errors = 0;
  std::map<MetricName, std::size_t> nulls_by_metric;
};

// Evaluates every (sample, metric) pair on `config.concurrency` workers and
// writes dataset.jsonl, scores.jsonl, traces.jsonl, backend_calls.jsonl and
// manifest.json into `out_dir`. Records are appended as they finish, then
// both JSONL files are rewritten sorted by (sample_id, metric).
// Errors: output_exists (without force), unwritable_output, validation
// errors from the dataset.
RunSummary run_evaluation(std::span<const EvalSample> dataset, const RunConfig& config, ChatBackend& chat,
                          Embedder& embedder, const std::filesystem::path& out_dir, const RunOptions& options = {});

// Builds backends from `config` and runs.
RunSummary run_evaluation(std::span<const EvalSample> dataset, const RunConfig& config,
                          const std::filesystem::path& out_dir, const RunOptions& options = {});

// Reads scores.jsonl back as results without traces.
std::vector<MetricResult> load_scores(const std::filesystem::path& path);

Json load_manifest(const std::filesystem::path& run_dir);

// File name -> problem, for every manifest digest or line count that no
// longer matches the file on disk. Empty when consistent.
std::vector<std::string> verify_manifest(const std::filesystem::path& run_dir);

struct ReplayReport {
  std::size_t records = 0;
  // "<file> <sample_id>/<metric>: <what>" for the first mismatch.
  std::optional<std::string> first_divergence;

  bool reproduced() const { return !first_divergence.has_value(); }
};

// Re-evaluates the run from its recorded judge exchanges and embeddings
// and compares the regenerated scores and traces with the files.
// Errors: missing_inputs (no traces.jsonl, scores.jsonl, dataset or manifest).
ReplayReport replay_run(const std::filesystem::path& run_dir);

}  // namespace rageval
