#pragma once

#include <span>
#include <string>
#include <vector>

namespace rageval {

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_id;

  std::size_t dim() const noexcept { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

// dot(a,b) / (|a| |b|), unclamped.
// Errors: dim_mismatch (length or model_id differ), zero_vector.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Raw-span variant used by the retriever's scan; no model check.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::string model_id() const = 0;

  // One vector per text, in order, all sharing model_id and dim.
  // Errors: precondition (empty list or empty text), dim_mismatch, plus
  // backend errors from the provider.
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts);

 protected:
  virtual std::vector<EmbeddingVector> do_embed(std::span<const std::string> texts) = 0;
};

}  // namespace rageval
