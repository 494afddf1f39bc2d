#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rageval/backends/embedding.hpp"
#include "rageval/core/json.hpp"
#include "rageval/core/types.hpp"

namespace rageval {

struct Chunk {
  std::string chunk_id;
  std::string text;
  std::string source_doc;
};

// JSONL of {chunk_id, text, source_doc}. Errors: io_error,
// malformed_record(line), duplicate_chunk_id.
std::vector<Chunk> load_corpus(const std::filesystem::path& path);

// JSONL of {question_id, gold_chunk_id}.
std::map<std::string, std::string> load_gold(const std::filesystem::path& path);

struct ScoredChunk {
  std::string chunk_id;
  double score = 0.0;

  bool operator==(const ScoredChunk&) const = default;
};

// Exact cosine index over chunk embeddings; immutable once built, so
// concurrent queries are safe.
//
// On-disk format (little-endian):
//   "RAGIDX01" | u32 len, model_id | u32 dim | u64 count
//   count x ( u32 len, chunk_id | dim x f64 )
class VectorIndex {
 public:
  VectorIndex(std::string model_id, std::size_t dim);

  // Errors: duplicate_chunk_id, dim_mismatch, zero_vector.
  void add(std::string chunk_id, std::vector<double> values);

  const std::string& model_id() const noexcept { return model_id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::string& chunk_id(std::size_t i) const { return ids_.at(i); }
  std::span<const double> vector(std::size_t i) const;

  // min(k, size()) best chunks by cosine, score descending, ties by
  // chunk_id ascending. Exhaustive scan.
  std::vector<ScoredChunk> top_k(const EmbeddingVector& query, std::size_t k) const;

  void save(const std::filesystem::path& path) const;
  static VectorIndex load(const std::filesystem::path& path);

 private:
  std::string model_id_;
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::vector<double> data_;  // row-major, size() x dim_
  std::map<std::string, std::size_t> position_;
};

// Embeds every chunk (in batches) into a new index.
// Errors: precondition (no chunks), duplicate_chunk_id, embedding errors.
VectorIndex index_corpus(std::span<const Chunk> chunks, Embedder& embedder, std::size_t batch_size = 64);

struct RetrievalRun {
  std::string question_id;
  std::vector<ScoredChunk> ranked;
  std::optional<std::string> gold_chunk_id;
  // hit_at[k] for k = 1..ranked.size(), once a gold chunk is set.
  std::map<std::size_t, bool> hit_at;

  // Whether the gold chunk is among the first k ranked entries.
  bool hit(std::size_t k) const;
};

// Errors: precondition (k == 0 or empty index), embedding errors.
RetrievalRun retrieve_top_k(const std::string& question_id, const std::string& question, const VectorIndex& index,
                            Embedder& embedder, std::size_t k);

// Records the gold chunk and fills hit_at.
void mark_gold(RetrievalRun& run, const std::string& gold_chunk_id);

struct AccuracyRow {
  std::size_t k = 0;
  std::size_t hits = 0;
  std::size_t total = 0;
  double accuracy = 0.0;  // percentage
};

// 100 * #(gold in top-k) / #runs for each k. Runs should be retrieved at
// depth >= max(ks). Errors: empty_runs, precondition (a run without gold).
std::vector<AccuracyRow> retrieval_accuracy(std::span<const RetrievalRun> runs, std::span<const std::size_t> ks);

// Sets retrieval_correct = hit(k) and replaces the contexts with the top-k
// chunk texts. Errors: id_mismatch, precondition (no gold, unknown chunk).
EvalSample stamp_retrieval_correct(EvalSample sample, const RetrievalRun& run, std::size_t k,
                                   const std::map<std::string, std::string>& chunk_texts);

Json run_to_json(const RetrievalRun& run);
RetrievalRun run_from_json(const Json& j);

}  // namespace rageval
