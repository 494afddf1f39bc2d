#include "rageval/retriever/retriever.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>

#include "rageval/core/text.hpp"
#include "rageval/error.hpp"

namespace rageval {

namespace {

constexpr char kMagic[8] = {'R', 'A', 'G', 'I', 'D', 'X', '0', '1'};

template <class UInt>
void put_le(std::ostream& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <class UInt>
UInt get_le(std::istream& in) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    int c = in.get();
    if (c == EOF) throw Error(ErrorCode::io_error, "truncated index file");
    v |= static_cast<UInt>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  auto n = get_le<std::uint32_t>(in);
  std::string s(n, '\0');
  if (!in.read(s.data(), n)) throw Error(ErrorCode::io_error, "truncated index file");
  return s;
}

template <class F>
void for_each_jsonl(const std::filesystem::path& path, F&& f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      f(Json::parse(line), line_no);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::malformed_record, e.what(), line_no);
    }
  }
}

bool ranks_before(const ScoredChunk& a, const ScoredChunk& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.chunk_id < b.chunk_id;
}

}  // namespace

std::vector<Chunk> load_corpus(const std::filesystem::path& path) {
  std::vector<Chunk> chunks;
  std::set<std::string> seen;
  for_each_jsonl(path, [&](const Json& j, long line_no) {
    Chunk c{j.at("chunk_id").get<std::string>(), j.at("text").get<std::string>(),
            j.value("source_doc", std::string())};
    if (c.chunk_id.empty() || text::trim(c.text).empty()) {
      throw Error(ErrorCode::malformed_record, "chunk_id and text must be non-empty", line_no);
    }
    if (!seen.insert(c.chunk_id).second) throw Error(ErrorCode::duplicate_chunk_id, c.chunk_id);
    chunks.push_back(std::move(c));
  });
  return chunks;
}

std::map<std::string, std::string> load_gold(const std::filesystem::path& path) {
  std::map<std::string, std::string> gold;
  for_each_jsonl(path, [&](const Json& j, long line_no) {
    auto q = j.at("question_id").get<std::string>();
    if (!gold.emplace(q, j.at("gold_chunk_id").get<std::string>()).second) {
      throw Error(ErrorCode::malformed_record, "duplicate question_id " + q, line_no);
    }
  });
  return gold;
}

VectorIndex::VectorIndex(std::string model_id, std::size_t dim) : model_id_(std::move(model_id)), dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::precondition, "index dim must be positive");
}

void VectorIndex::add(std::string chunk_id, std::vector<double> values) {
  if (values.size() != dim_) {
    throw Error(ErrorCode::dim_mismatch, chunk_id + ": " + std::to_string(values.size()) + " vs " + std::to_string(dim_));
  }
  if (std::all_of(values.begin(), values.end(), [](double x) { return x == 0.0; })) {
    throw Error(ErrorCode::zero_vector, chunk_id);
  }
  if (!position_.emplace(chunk_id, ids_.size()).second) throw Error(ErrorCode::duplicate_chunk_id, chunk_id);
  ids_.push_back(std::move(chunk_id));
  data_.insert(data_.end(), values.begin(), values.end());
}

std::span<const double> VectorIndex::vector(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("VectorIndex::vector");
  return std::span<const double>(data_).subspan(i * dim_, dim_);
}

std::vector<ScoredChunk> VectorIndex::top_k(const EmbeddingVector& query, std::size_t k) const {
  if (query.model_id != model_id_) {
    throw Error(ErrorCode::dim_mismatch, "query model " + query.model_id + " vs index " + model_id_);
  }
  std::vector<ScoredChunk> scored;
  scored.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    scored.push_back({ids_[i], cosine_similarity(std::span<const double>(query.values), vector(i))});
  }
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), ranks_before);
  scored.resize(keep);
  return scored;
}

void VectorIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::unwritable_output, path.string());
  out.write(kMagic, sizeof kMagic);
  put_string(out, model_id_);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    put_string(out, ids_[i]);
    for (double x : vector(i)) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
  }
  if (!out) throw Error(ErrorCode::unwritable_output, path.string());
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open index " + path.string());
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
    throw Error(ErrorCode::io_error, path.string() + " is not an index file");
  }
  std::string model_id = get_string(in);
  auto dim = get_le<std::uint32_t>(in);
  auto count = get_le<std::uint64_t>(in);
  VectorIndex index(std::move(model_id), dim);
  for (std::uint64_t c = 0; c < count; ++c) {
    std::string id = get_string(in);
    std::vector<double> values(dim);
    for (auto& x : values) x = std::bit_cast<double>(get_le<std::uint64_t>(in));
    index.add(std::move(id), std::move(values));
  }
  return index;
}

VectorIndex index_corpus(std::span<const Chunk> chunks, Embedder& embedder, std::size_t batch_size) {
  if (chunks.empty()) throw Error(ErrorCode::precondition, "corpus is empty");
  std::set<std::string> seen;
  for (const auto& c : chunks) {
    if (!seen.insert(c.chunk_id).second) throw Error(ErrorCode::duplicate_chunk_id, c.chunk_id);
  }
  std::optional<VectorIndex> index;
  batch_size = std::max<std::size_t>(1, batch_size);
  for (std::size_t begin = 0; begin < chunks.size(); begin += batch_size) {
    const auto end = std::min(chunks.size(), begin + batch_size);
    std::vector<std::string> texts;
    for (std::size_t i = begin; i < end; ++i) texts.push_back(chunks[i].text);
    auto vectors = embedder.embed(texts);
    if (!index) index.emplace(vectors.front().model_id, vectors.front().dim());
    for (std::size_t i = begin; i < end; ++i) {
      if (vectors[i - begin].model_id != index->model_id()) throw Error(ErrorCode::dim_mismatch, "model changed");
      index->add(chunks[i].chunk_id, std::move(vectors[i - begin].values));
    }
  }
  return std::move(*index);
}

bool RetrievalRun::hit(std::size_t k) const {
  if (!gold_chunk_id) return false;
  const auto depth = std::min(k, ranked.size());
  return std::any_of(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(depth),
                     [&](const ScoredChunk& s) { return s.chunk_id == *gold_chunk_id; });
}

RetrievalRun retrieve_top_k(const std::string& question_id, const std::string& question, const VectorIndex& index,
                            Embedder& embedder, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::precondition, "k must be >= 1");
  if (index.size() == 0) throw Error(ErrorCode::precondition, "index is empty");
  std::vector<std::string> texts{question};
  auto query = embedder.embed(texts).front();
  return RetrievalRun{question_id, index.top_k(query, k), std::nullopt, {}};
}

void mark_gold(RetrievalRun& run, const std::string& gold_chunk_id) {
  run.gold_chunk_id = gold_chunk_id;
  run.hit_at.clear();
  for (std::size_t k = 1; k <= run.ranked.size(); ++k) run.hit_at[k] = run.hit(k);
}

std::vector<AccuracyRow> retrieval_accuracy(std::span<const RetrievalRun> runs, std::span<const std::size_t> ks) {
  if (runs.empty()) throw Error(ErrorCode::empty_runs, "no retrieval runs");
  std::vector<AccuracyRow> rows;
  for (std::size_t k : ks) {
    if (k == 0) throw Error(ErrorCode::precondition, "k must be >= 1");
    AccuracyRow row{k, 0, runs.size(), 0.0};
    for (const auto& run : runs) {
      if (!run.gold_chunk_id) throw Error(ErrorCode::precondition, run.question_id + " has no gold chunk");
      if (run.hit(k)) ++row.hits;
    }
    row.accuracy = 100.0 * static_cast<double>(row.hits) / static_cast<double>(row.total);
    rows.push_back(row);
  }
  return rows;
}

EvalSample stamp_retrieval_correct(EvalSample sample, const RetrievalRun& run, std::size_t k,
                                   const std::map<std::string, std::string>& chunk_texts) {
  if (run.question_id != sample.id) throw Error(ErrorCode::id_mismatch, run.question_id + " vs " + sample.id);
  if (!run.gold_chunk_id) throw Error(ErrorCode::precondition, run.question_id + " has no gold chunk");
  if (k == 0) throw Error(ErrorCode::precondition, "k must be >= 1");
  sample.retrieval_correct = run.hit(k);
  sample.contexts.clear();
  const auto depth = std::min(k, run.ranked.size());
  for (std::size_t i = 0; i < depth; ++i) {
    auto it = chunk_texts.find(run.ranked[i].chunk_id);
    if (it == chunk_texts.end()) throw Error(ErrorCode::precondition, "no text for chunk " + run.ranked[i].chunk_id);
    sample.contexts.push_back(it->second);
  }
  return sample;
}

Json run_to_json(const RetrievalRun& run) {
  Json ranked = Json::array();
  for (const auto& s : run.ranked) ranked.push_back({{"chunk_id", s.chunk_id}, {"score", s.score}});
  Json hits = Json::object();
  for (const auto& [k, h] : run.hit_at) hits[std::to_string(k)] = h;
  Json j = Json::object();
  j["question_id"] = run.question_id;
  j["gold_chunk_id"] = run.gold_chunk_id ? Json(*run.gold_chunk_id) : Json(nullptr);
  j["ranked"] = std::move(ranked);
  j["hit_at"] = std::move(hits);
  return j;
}

RetrievalRun run_from_json(const Json& j) {
  RetrievalRun run;
  run.question_id = j.at("question_id").get<std::string>();
  for (const auto& s : j.at("ranked")) run.ranked.push_back({s.at("chunk_id").get<std::string>(), s.at("score").get<double>()});
  if (j.contains("gold_chunk_id") && j["gold_chunk_id"].is_string()) mark_gold(run, j["gold_chunk_id"].get<std::string>());
  return run;
}

}  // namespace rageval
