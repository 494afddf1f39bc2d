#include "rageval/metrics/formulas.hpp"

#include <cmath>

#include "rageval/error.hpp"

namespace rageval {

void validate_weights(const MetricWeights& w) {
  if (!(w.w_factual >= 0.0) || !(w.w_similarity >= 0.0) ||
      std::abs(w.w_factual + w.w_similarity - 1.0) > 1e-12) {
    throw Error(ErrorCode::precondition, "metric weights must be non-negative and sum to 1");
  }
}

std::optional<double> faithfulness_score(std::size_t supported, std::size_t total) {
  if (total == 0) return std::nullopt;
  if (supported > total) throw Error(ErrorCode::precondition, "more supported statements than statements");
  return static_cast<double>(supported) / static_cast<double>(total);
}

double answer_relevance_score(std::span<const double> raw) {
  if (raw.empty()) throw Error(ErrorCode::precondition, "answer relevance needs at least one question");
  double sum = 0.0;
  for (double s : raw) sum += clamp01(s);
  return sum / static_cast<double>(raw.size());
}

ContextRelevanceScore context_relevance_score(std::size_t extracted, std::size_t sentence_count) {
  if (sentence_count == 0) throw Error(ErrorCode::zero_sentence_context, "context has no sentences");
  if (extracted > sentence_count) return {1.0, true};
  return {static_cast<double>(extracted) / static_cast<double>(sentence_count), false};
}

std::optional<double> factual_correctness_score(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp == 0 && fp == 0 && fn == 0) return std::nullopt;
  const double t = static_cast<double>(tp);
  return t / (t + 0.5 * static_cast<double>(fp + fn));
}

double answer_correctness_score(double factual, double similarity, const MetricWeights& w) {
  validate_weights(w);
  return w.w_factual * factual + w.w_similarity * similarity;
}

}  // namespace rageval
