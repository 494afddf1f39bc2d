#include "rageval/core/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace rageval::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

constexpr std::array<std::string_view, 7> kAbbreviations = {
    "rel.", "e.g.", "i.e.", "fig.", "sec.", "cf.", "etc.",
};

bool is_initial(std::string_view word) {
  return word.size() == 2 && is_upper(word[0]) && word[1] == '.';
}

bool is_capitalized(std::string_view word) {
  return !word.empty() && is_upper(word.front());
}

// Word (space-delimited token) of `s` ending at index `end` (exclusive).
std::string_view word_ending_at(std::string_view s, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && s[begin - 1] != ' ') --begin;
  return s.substr(begin, end - begin);
}

// Whether the '.'-terminated `word` ending at `end` suppresses a split.
bool guards_split(std::string_view s, std::size_t sentence_begin, std::size_t end) {
  std::string_view word = word_ending_at(s, end);
  std::string lower = to_lower(word);
  // Leading opener characters do not change what the word is.
  std::string_view bare = lower;
  while (!bare.empty() && is_opener(bare.front())) bare.remove_prefix(1);
  for (std::string_view abbr : kAbbreviations) {
    if (bare == abbr) return true;
  }
  std::string_view raw = word;
  while (!raw.empty() && is_opener(raw.front())) raw.remove_prefix(1);
  if (!is_initial(raw)) return false;

  std::size_t word_begin = end - word.size();
  if (word_begin <= sentence_begin) return true;
  // word_begin - 1 is the separating space.
  std::string_view prev = word_ending_at(s, word_begin - 1);
  return is_capitalized(prev) || is_initial(prev);
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && to_lower(a) == to_lower(b);
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : s) {
    if (c == '\r') continue;
    if (c == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  lines.push_back(std::move(cur));
  return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

SentenceList split_sentences(std::string_view text) {
  SentenceList result;
  result.source_text = std::string(text);
  const std::string norm = normalize_whitespace(text);
  const std::string_view s = norm;

  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_terminator(s[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < s.size() && is_terminator(s[run_end])) ++run_end;
    std::size_t end = run_end;
    while (end < s.size() && is_closer(s[end])) ++end;

    bool boundary = false;
    if (end == s.size()) {
      boundary = true;
    } else if (s[end] == ' ' && end + 1 < s.size()) {
      std::size_t next = end + 1;
      while (next < s.size() && is_opener(s[next])) ++next;
      boundary = next < s.size() && is_upper(s[next]);
    }
    // Only a lone '.' can close an abbreviation or initial.
    if (boundary && end < s.size() && run_end - i == 1 && s[i] == '.' &&
        guards_split(s, begin, run_end)) {
      boundary = false;
    }

    if (boundary) {
      result.sentences.emplace_back(s.substr(begin, end - begin));
      begin = end < s.size() ? end + 1 : end;
    }
    i = end;
  }
  if (begin < s.size()) result.sentences.emplace_back(s.substr(begin));
  return result;
}

}  // namespace rageval::text
