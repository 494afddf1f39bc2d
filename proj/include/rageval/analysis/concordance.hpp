#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rageval/core/json.hpp"
#include "rageval/core/types.hpp"

namespace rageval {

// Metric -> sample id -> value (nullopt for a null metric result).
using ScoreTable = std::map<MetricName, std::map<std::string, std::optional<double>>>;

struct Thresholds {
  double high1 = 0.7;  // m1 > high1
  double high2 = 0.7;  // m2 > high2
  double low1 = 0.3;   // m1 < low1
  double low2 = 0.3;   // m2 < low2

  bool operator==(const Thresholds&) const = default;
};

struct Ratio {
  std::size_t numerator = 0;
  std::size_t denominator = 0;

  // numerator / denominator, unset when the denominator is 0.
  std::optional<double> value() const;
  bool operator==(const Ratio&) const = default;
};

// Empirical conditional frequencies of human correctness given metric
// scores above (below) thresholds, single-metric and joint. Comparisons are
// strict, so a value equal to a threshold satisfies neither condition.
struct ConcordanceReport {
  MetricName m1 = MetricName::factual_correctness;
  MetricName m2 = MetricName::faithfulness;
  Thresholds thresholds;

  Ratio correct_given_joint_high;  // P(c | m1 > high1, m2 > high2)
  Ratio wrong_given_joint_low;     // P(w | m1 < low1, m2 < low2)
  Ratio correct_given_m1_high;
  Ratio correct_given_m2_high;
  Ratio wrong_given_m1_low;
  Ratio wrong_given_m2_low;

  // Population: labelled samples with both metric values present.
  std::size_t eligible = 0;
  std::size_t correct = 0;
  std::size_t wrong = 0;
  std::size_t excluded_unlabeled = 0;
  std::size_t excluded_null = 0;
  // Eligible samples sitting exactly on a threshold.
  std::size_t m1_at_high = 0;
  std::size_t m1_at_low = 0;
  std::size_t m2_at_high = 0;
  std::size_t m2_at_low = 0;

  bool operator==(const ConcordanceReport&) const = default;
};

// Errors: no_labels when no sample carries human_correct.
ConcordanceReport concordance(std::span<const EvalSample> samples, const ScoreTable& scores, MetricName m1,
                              MetricName m2, const Thresholds& thresholds);

// One report per grid point, in grid order.
std::vector<ConcordanceReport> threshold_sweep(std::span<const EvalSample> samples, const ScoreTable& scores,
                                               MetricName m1, MetricName m2, std::span<const Thresholds> grid);

// Grid points start, start+step, ..., end (inclusive), each used for all
// four thresholds. Values are rounded to 12 decimals to absorb step drift.
std::vector<Thresholds> uniform_grid(double start, double end, double step);

Json report_to_json(const ConcordanceReport& r);
// Errors: malformed_record.
ConcordanceReport report_from_json(const Json& j);

}  // namespace rageval
