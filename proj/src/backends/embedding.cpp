#include "rageval/backends/embedding.hpp"

#include <cmath>

#include "rageval/core/text.hpp"
#include "rageval/error.hpp"

namespace rageval {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dim_mismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw Error(ErrorCode::zero_vector, "cosine of a zero vector");
  return dot / (std::sqrt(aa) * std::sqrt(bb));
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.model_id != b.model_id) {
    throw Error(ErrorCode::dim_mismatch, "model " + a.model_id + " vs " + b.model_id);
  }
  return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

std::vector<EmbeddingVector> Embedder::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorCode::precondition, "embed needs at least one text");
  for (const auto& t : texts) {
    if (text::trim(t).empty()) throw Error(ErrorCode::precondition, "cannot embed empty text");
  }
  auto out = do_embed(texts);
  if (out.size() != texts.size()) {
    throw Error(ErrorCode::dim_mismatch, "provider returned " + std::to_string(out.size()) +
                                             " vectors for " + std::to_string(texts.size()) + " texts");
  }
  for (const auto& v : out) {
    if (v.dim() == 0 || v.dim() != out.front().dim() || v.model_id != out.front().model_id) {
      throw Error(ErrorCode::dim_mismatch, "provider returned inconsistent vectors");
    }
  }
  return out;
}

}  // namespace rageval
