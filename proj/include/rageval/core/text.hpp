#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rageval/core/types.hpp"

namespace rageval::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

// Collapses every run of ASCII whitespace to one space and trims both ends.
std::string normalize_whitespace(std::string_view s);

// Splits on '\n' (dropping '\r'); keeps empty lines.
std::vector<std::string> split_lines(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Deterministic sentence segmentation.
//
// The text is whitespace-normalized first. A boundary follows a run of
// '.', '!' or '?' (plus any closing quotes/brackets) when the next thing is
// end-of-text, or a space followed by an uppercase letter (optionally behind
// an opening quote/bracket). A '.' does not end a sentence when the word it
// closes is a guarded abbreviation (Rel., e.g., i.e., Fig., Sec., cf., etc.)
// or a single-letter initial. Decimal numbers never split because their '.'
// is not followed by whitespace.
//
// A single uppercase letter counts as an initial only when it opens the
// sentence or follows a capitalized word or another initial ("J. R. Smith",
// "John F. Kennedy"); "A is B. C is D." still splits after "B.".
SentenceList split_sentences(std::string_view text);

}  // namespace rageval::text
