#include "rageval/metrics/parsers.hpp"

#include <optional>
#include <regex>
#include <set>

#include "rageval/core/json.hpp"
#include "rageval/core/text.hpp"
#include "rageval/error.hpp"

namespace rageval::parse {

namespace {

constexpr std::string_view kBullets[] = {"\xE2\x80\xA2", "\xE2\x80\x93", "-", "*", "+"};

const std::regex& enumeration_re() {
  static const std::regex re(R"(^(?:(?:statement|question|s|q)\s*)?(?:\(\d{1,3}\)|\d{1,3}[.):])\s+)",
                             std::regex::icase);
  return re;
}

bool is_header(const std::string& line, std::string_view noun) {
  if (line.empty() || line.back() != ':') return false;
  return text::to_lower(line).find(noun) != std::string::npos;
}

std::vector<std::string> listed_lines(std::string_view completion, std::string_view noun) {
  std::vector<std::string> out;
  for (const auto& raw : text::split_lines(completion)) {
    std::string line = strip_enumeration(raw);
    if (line.empty() || is_header(line, noun)) continue;
    out.push_back(std::move(line));
  }
  return out;
}

// Lowercase with surrounding markdown/punctuation removed: "**Yes.**" -> "yes".
std::string bare_word(std::string_view s) {
  std::string t = text::to_lower(text::trim(s));
  auto junk = [](char c) { return c == '*' || c == '.' || c == '!' || c == '"' || c == '\'' || c == '`' || c == ':'; };
  std::size_t b = 0;
  std::size_t e = t.size();
  while (b < e && junk(t[b])) ++b;
  while (e > b && junk(t[e - 1])) --e;
  return text::trim(std::string_view(t).substr(b, e - b));
}

struct Found {
  std::vector<bool> supported;
  std::vector<std::string> explanations;  // parallel when known
};

bool is_yes(const std::string& token) { return text::to_lower(token) == "yes"; }

// "1. Yes 2. No", "Statement 2: no".
Found numbered(std::string_view block) {
  static const std::regex re(
      R"((?:^|[^a-z0-9])(?:statement\s*)?(\d{1,3})\s*[.):\-]?\s*(?:verdict\s*[:\-]?\s*)?\**\s*(yes|no)\b)",
      std::regex::icase);
  Found f;
  std::string s(block);
  int expect = 1;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    if (std::stoi((*it)[1].str()) != expect) return {};
    f.supported.push_back(is_yes((*it)[2].str()));
    ++expect;
  }
  return f;
}

// "... Verdict: Yes" markers, each preceded by its explanation.
Found verdict_markers(std::string_view block) {
  static const std::regex re(R"(verdict\s*(?:\(yes/no\))?\s*\**\s*[:\-]\s*\**\s*(yes|no)\b)", std::regex::icase);
  Found f;
  std::string s(block);
  std::size_t prev_end = 0;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    f.supported.push_back(is_yes((*it)[1].str()));
    auto pos = static_cast<std::size_t>(it->position(0));
    f.explanations.push_back(text::normalize_whitespace(s.substr(prev_end, pos - prev_end)));
    prev_end = pos + static_cast<std::size_t>(it->length(0));
  }
  return f;
}

// Lines that say only yes or no.
Found bare_lines(std::string_view block) {
  Found f;
  for (const auto& raw : text::split_lines(block)) {
    std::string w = bare_word(strip_enumeration(raw));
    if (w == "yes" || w == "no") f.supported.push_back(w == "yes");
  }
  return f;
}

// Any yes/no token.
Found bare_tokens(std::string_view block) {
  static const std::regex re(R"(\b(yes|no)\b)", std::regex::icase);
  Found f;
  std::string s(block);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
    f.supported.push_back(is_yes((*it)[1].str()));
  }
  return f;
}

// Splits free-text explanations into per-statement segments when the text
// is enumerated once per statement.
std::vector<std::string> enumerated_segments(std::string_view region) {
  std::vector<std::string> segments;
  for (const auto& raw : text::split_lines(region)) {
    std::string line = text::trim(raw);
    if (line.empty()) continue;
    bool starts_item = std::regex_search(line, enumeration_re()) ||
                       text::to_lower(line).rfind("statement", 0) == 0;
    if (starts_item || segments.empty()) {
      segments.push_back(strip_enumeration(line));
    } else {
      segments.back() += " " + line;
    }
  }
  return segments;
}

std::string strip_quotes(std::string s) {
  s = text::trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    s = text::trim(std::string_view(s).substr(1, s.size() - 2));
  }
  return s;
}

// Top-level comma split of a bracketed list body, honoring quotes.
std::vector<std::string> split_items(std::string_view body) {
  std::vector<std::string> items;
  std::string cur;
  char quote = 0;
  int depth = 0;
  for (char c : body) {
    if (quote) {
      if (c == quote) quote = 0;
      cur.push_back(c);
      continue;
    }
    if (c == '"' || c == '\'') {
      // An apostrophe inside a word is not a quote.
      if (c == '\'' && !text::trim(cur).empty()) {
        cur.push_back(c);
        continue;
      }
      quote = c;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      --depth;
    } else if (c == ',' && depth == 0) {
      items.push_back(strip_quotes(cur));
      cur.clear();
      continue;
    }
    cur.push_back(c);
  }
  items.push_back(strip_quotes(cur));
  std::erase_if(items, [](const std::string& s) { return s.empty(); });
  return items;
}

std::optional<Classification> classification_from_json(std::string_view completion) {
  auto open = completion.find('{');
  auto close = completion.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
  Json doc;
  try {
    doc = Json::parse(completion.substr(open, close - open + 1));
  } catch (const Json::parse_error&) {
    return std::nullopt;
  }
  if (!doc.is_object()) return std::nullopt;
  Classification c;
  bool any = false;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    std::string key = text::to_lower(it.key());
    std::vector<std::string>* target = key == "tp" ? &c.tp : key == "fp" ? &c.fp : key == "fn" ? &c.fn : nullptr;
    if (!target) continue;
    if (!it.value().is_array()) return std::nullopt;
    any = true;
    for (const auto& item : it.value()) {
      std::string s = item.is_string() ? item.get<std::string>() : item.dump();
      s = text::trim(s);
      if (!s.empty()) target->push_back(std::move(s));
    }
  }
  if (!any) return std::nullopt;
  return c;
}

std::optional<Classification> classification_from_labels(std::string_view completion) {
  static const std::regex label_re(R"((?:^|[^A-Za-z0-9])["']?(TP|FP|FN)["']?\s*[:=]\s*)", std::regex::icase);
  std::string s(completion);
  struct Label {
    std::string name;
    std::size_t body_begin;
    std::size_t match_begin;
  };
  std::vector<Label> labels;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), label_re); it != std::sregex_iterator(); ++it) {
    labels.push_back({text::to_lower((*it)[1].str()), static_cast<std::size_t>(it->position(0) + it->length(0)),
                      static_cast<std::size_t>(it->position(1))});
  }
  if (labels.empty()) return std::nullopt;

  Classification c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::size_t end = i + 1 < labels.size() ? labels[i + 1].match_begin : s.size();
    std::string_view body = std::string_view(s).substr(labels[i].body_begin, end - labels[i].body_begin);
    std::vector<std::string> items;
    if (!body.empty() && body.front() == '[') {
      int depth = 0;
      std::size_t close = std::string_view::npos;
      char quote = 0;
      for (std::size_t k = 0; k < body.size(); ++k) {
        char ch = body[k];
        if (quote) {
          if (ch == quote) quote = 0;
        } else if (ch == '"') {
          quote = ch;
        } else if (ch == '[') {
          ++depth;
        } else if (ch == ']' && --depth == 0) {
          close = k;
          break;
        }
      }
      items = split_items(body.substr(1, (close == std::string_view::npos ? body.size() : close) - 1));
    } else {
      // Bullet list under the label, or the rest of the line.
      for (const auto& raw : text::split_lines(body)) {
        std::string line = strip_quotes(strip_enumeration(raw));
        while (!line.empty() && (line.back() == ',')) line.pop_back();
        line = text::trim(line);
        if (!line.empty() && line != "}" && line != "{") items.push_back(line);
      }
    }
    auto& target = labels[i].name == "tp" ? c.tp : labels[i].name == "fp" ? c.fp : c.fn;
    target.insert(target.end(), items.begin(), items.end());
  }
  return c;
}

}  // namespace

std::string strip_enumeration(std::string_view line) {
  std::string s = text::trim(line);
  for (int round = 0; round < 4; ++round) {
    bool changed = false;
    for (std::string_view bullet : kBullets) {
      if (s.size() > bullet.size() && s.compare(0, bullet.size(), bullet) == 0 &&
          (bullet.size() > 1 || s[bullet.size()] == ' ' || s[bullet.size()] == '\t')) {
        s = text::trim(std::string_view(s).substr(bullet.size()));
        changed = true;
        break;
      }
    }
    std::smatch m;
    if (!changed && std::regex_search(s, m, enumeration_re())) {
      s = text::trim(std::string_view(s).substr(static_cast<std::size_t>(m.length(0))));
      changed = true;
    }
    if (!changed) break;
  }
  return s;
}

std::vector<std::string> statements(std::string_view completion) {
  // JSON list output, possibly an explicit empty list.
  std::string trimmed = text::trim(completion);
  if (!trimmed.empty() && (trimmed.front() == '[' || trimmed.front() == '{')) {
    try {
      Json doc = Json::parse(trimmed);
      if (doc.is_object() && doc.contains("statements")) doc = doc["statements"];
      if (doc.is_array()) {
        std::vector<std::string> out;
        for (const auto& item : doc) {
          std::string s = text::trim(item.is_string() ? item.get<std::string>() : item.dump());
          if (!s.empty()) out.push_back(std::move(s));
        }
        return out;
      }
    } catch (const Json::parse_error&) {
    }
  }
  std::string word = bare_word(trimmed);
  if (word == "none" || word == "no statements" || word == "n/a") return {};
  auto out = listed_lines(completion, "statement");
  if (out.empty()) throw Error(ErrorCode::parse_failure, "no statements in completion");
  return out;
}

std::vector<std::string> questions(std::string_view completion) {
  auto out = listed_lines(completion, "question");
  if (out.empty()) throw Error(ErrorCode::parse_failure, "no questions in completion");
  return out;
}

std::vector<ParsedVerdict> verdicts(std::string_view completion, std::size_t expected) {
  if (expected == 0) throw Error(ErrorCode::precondition, "no statements to judge");

  static const std::regex final_re(R"(final\s+verdicts?)", std::regex::icase);
  std::string s(completion);
  std::optional<std::size_t> block_begin;
  std::size_t phrase_begin = 0;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), final_re); it != std::sregex_iterator(); ++it) {
    phrase_begin = static_cast<std::size_t>(it->position(0));
    block_begin = phrase_begin + static_cast<std::size_t>(it->length(0));
  }

  std::vector<Found> attempts;
  std::string_view whole = s;
  std::string_view explanation_region = whole;
  if (block_begin) {
    std::string_view block = whole.substr(*block_begin);
    explanation_region = whole.substr(0, phrase_begin);
    attempts.push_back(numbered(block));
    attempts.push_back(bare_lines(block));
    attempts.push_back(bare_tokens(block));
  }
  attempts.push_back(verdict_markers(whole));
  attempts.push_back(numbered(whole));
  attempts.push_back(bare_lines(whole));

  std::optional<std::size_t> first_nonzero;
  for (auto& f : attempts) {
    if (f.supported.empty()) continue;
    if (!first_nonzero) first_nonzero = f.supported.size();
    if (f.supported.size() != expected) continue;

    std::vector<std::string> explanations = f.explanations;
    if (explanations.size() != expected) {
      explanations = enumerated_segments(explanation_region);
      if (explanations.size() != expected) explanations.assign(expected, "");
    }
    std::vector<ParsedVerdict> out;
    for (std::size_t i = 0; i < expected; ++i) out.push_back({f.supported[i], explanations[i]});
    return out;
  }
  if (first_nonzero) {
    throw Error(ErrorCode::verdict_count_mismatch,
                "expected " + std::to_string(expected) + " verdicts, found " + std::to_string(*first_nonzero));
  }
  throw Error(ErrorCode::parse_failure, "no verdicts in completion");
}

Classification classification(std::string_view completion) {
  auto parsed = classification_from_json(completion);
  if (!parsed) parsed = classification_from_labels(completion);
  if (!parsed) throw Error(ErrorCode::parse_failure, "no TP/FP/FN labels in completion");

  Classification out;
  std::set<std::string> seen;
  auto keep = [&](const std::vector<std::string>& in, std::vector<std::string>& dst) {
    for (const auto& item : in) {
      if (seen.insert(item).second) {
        dst.push_back(item);
      } else {
        ++out.duplicates_dropped;
      }
    }
  };
  keep(parsed->tp, out.tp);
  keep(parsed->fp, out.fp);
  keep(parsed->fn, out.fn);
  return out;
}

ContextExtraction context_extraction(std::string_view completion) {
  ContextExtraction out;
  bool any_line = false;
  bool phrase = false;
  for (const auto& raw : text::split_lines(completion)) {
    std::string line = strip_enumeration(raw);
    if (line.empty()) continue;
    any_line = true;
    if (bare_word(line) == "insufficient information") {
      phrase = true;
      continue;
    }
    for (auto& sentence : text::split_sentences(line).sentences) out.sentences.push_back(std::move(sentence));
  }
  if (!any_line) throw Error(ErrorCode::parse_failure, "empty extraction completion");
  out.insufficient_information = phrase && out.sentences.empty();
  return out;
}

}  // namespace rageval::parse
