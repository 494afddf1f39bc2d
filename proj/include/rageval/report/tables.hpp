#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rageval/analysis/concordance.hpp"
#include "rageval/analysis/stats.hpp"
#include "rageval/retriever/retriever.hpp"

namespace rageval {

enum class TableStyle { table1, table2, table3 };
std::string_view to_string(TableStyle s);
std::optional<TableStyle> parse_table_style(std::string_view s);

// Two decimals, ties to even on the exact binary value ("0.91").
std::string fixed2(double x);
// "mean(sd)" cell, e.g. "0.91(0.19)"; a U+2014 dash for an empty group.
std::string mean_sd_cell(const GroupedStats& g);

struct RenderedTable {
  std::string text;
  std::string csv;
};

// Retriever accuracy: one row per model, one column per k.
struct AccuracyTable {
  std::string model;
  std::vector<AccuracyRow> rows;
};
RenderedTable render_accuracy(std::span<const AccuracyTable> models);

// Grouped metric statistics: Yes rows before No rows, FaiFul..AnsCor, then
// Questions, then FacCor.
RenderedTable render_grouped(std::span<const GroupedStats> stats, const std::string& label);

// Conditional probabilities per metric and joint, for one or more labelled
// runs sharing thresholds.
struct ConcordanceRow {
  std::string label;
  ConcordanceReport report;
};
RenderedTable render_concordance(std::span<const ConcordanceRow> rows);

// File in an accuracy directory written by the retrieve command.
inline constexpr const char* kAccuracyFile = "accuracy.json";
// File under <run>/analysis written by the analyze command.
inline constexpr const char* kConcordanceFile = "concordance.json";

// Reads what `style` needs from `dir`, writes tables/<style>.txt and .csv
// and returns the text. Errors: missing_inputs(style), output_exists when
// the table files exist and `force` is false.
RenderedTable render_tables(const std::filesystem::path& dir, TableStyle style, bool force = false);

}  // namespace rageval
