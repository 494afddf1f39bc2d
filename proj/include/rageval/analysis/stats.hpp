#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rageval/core/types.hpp"
#include "rageval/metrics/traces.hpp"

namespace rageval {

struct GroupedStats {
  MetricName metric = MetricName::faithfulness;
  bool retrieval_correct = true;
  std::size_t n = 0;           // non-null values
  std::size_t null_count = 0;
  std::optional<double> mean;  // unset when n == 0
  std::optional<double> sd;    // sample s.d. (n - 1); 0 when n == 1
  std::size_t questions() const noexcept { return n + null_count; }
};

double mean(std::span<const double> xs);
// Sample standard deviation with the n - 1 denominator; 0 for one value.
double sample_sd(std::span<const double> xs);

// One row per (metric, retrieval_correct) for every metric present in
// `results`, metrics in canonical order, Yes before No.
// Errors: unresolved_sample_id, missing_field(retrieval_correct).
std::vector<GroupedStats> group_stats(std::span<const MetricResult> results, std::span<const EvalSample> samples);

enum class Sidedness { two_sided, one_sided_greater };

struct TTestResult {
  double t = 0.0;
  double df = 0.0;  // Welch-Satterthwaite
  double p = 1.0;
};

// Welch's unequal-variance t-test of mean(a) vs mean(b). one_sided_greater
// tests mean(a) > mean(b). Errors: insufficient_data (fewer than 2 values).
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b, Sidedness sidedness);

}  // namespace rageval
