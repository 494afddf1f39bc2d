#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace rageval {

struct MetricWeights {
  double w_factual = 0.75;
  double w_similarity = 0.25;
};

// Throws Error(precondition) unless both weights are >= 0 and sum to 1.
void validate_weights(const MetricWeights& w);

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// |V| / |S|; nullopt when there are no statements.
std::optional<double> faithfulness_score(std::size_t supported, std::size_t total);

// Mean of the clamped similarities. Requires a non-empty span.
double answer_relevance_score(std::span<const double> raw_similarities);

struct ContextRelevanceScore {
  double value = 0.0;
  bool capped = false;
};
// |S_ext| / |c(q)| capped at 1. Requires sentence_count > 0.
ContextRelevanceScore context_relevance_score(std::size_t extracted, std::size_t sentence_count);

// TP / (TP + 0.5 (FP + FN)); nullopt when all three counts are zero.
std::optional<double> factual_correctness_score(std::size_t tp, std::size_t fp, std::size_t fn);

double answer_correctness_score(double factual, double similarity, const MetricWeights& w);

}  // namespace rageval
