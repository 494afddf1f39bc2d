#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rageval::parse {

// Removes leading list markers: bullets ("-", "*", "+", "•", "–") and
// enumerations ("1.", "1)", "(1)", "S1:", "Q2.", "Statement 3:").
// Markers must be followed by whitespace, so "1.5 GHz" is left intact.
std::string strip_enumeration(std::string_view line);

// One statement per non-empty line, markers stripped. Header lines such as
// "Statements:" are dropped. A JSON array (or {"statements": [...]}) is read
// as a list, and an explicit "[]" or "None" yields zero statements.
// Errors: parse_failure when the completion holds nothing usable.
std::vector<std::string> statements(std::string_view completion);

// Same line rules as statements(). Errors: parse_failure when empty.
std::vector<std::string> questions(std::string_view completion);

struct ParsedVerdict {
  bool supported = false;
  std::string explanation;
};

// Final Yes/No verdicts for `expected` statements, in order.
//
// The text after the last "final verdict" phrase is searched first, then
// the whole completion. Accepted shapes: numbered entries ("1. Yes 2. No",
// "Statement 2: no"), "Verdict: Yes" markers, lines holding only yes/no,
// and (inside a final-verdict block) bare yes/no tokens. Case and trailing
// punctuation are ignored. The first shape that yields exactly `expected`
// verdicts wins.
//
// Errors: verdict_count_mismatch when verdicts are found but never exactly
// `expected`; parse_failure when none are found.
std::vector<ParsedVerdict> verdicts(std::string_view completion, std::size_t expected);

struct Classification {
  std::vector<std::string> tp;
  std::vector<std::string> fp;
  std::vector<std::string> fn;
  // Items dropped because an earlier list already held the same string.
  std::size_t duplicates_dropped = 0;
};

// TP/FP/FN lists, from a JSON object or from "TP: [a, b]" / "TP:\n- a"
// label syntax. A missing label yields an empty list as long as one label
// is present. Errors: parse_failure when no label is found.
Classification classification(std::string_view completion);

struct ContextExtraction {
  std::vector<std::string> sentences;
  bool insufficient_information = false;
};

// Sentences the judge extracted (each line re-split into sentences), or the
// "Insufficient Information" signal. Errors: parse_failure on an empty
// completion.
ContextExtraction context_extraction(std::string_view completion);

}  // namespace rageval::parse
