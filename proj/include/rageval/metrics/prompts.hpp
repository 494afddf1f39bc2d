#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rageval {

enum class PromptId {
  statement_extraction,
  statement_verdicts,
  question_generation,
  question_list,
  context_extraction,
  factual_classification,
};

std::string_view to_string(PromptId id);

struct PromptTemplate {
  PromptId id = PromptId::statement_extraction;
  std::string text;
  std::string version;

  std::string digest() const;
  // Replaces {name} for every key in `vars`; other braces are left alone.
  std::string render(const std::map<std::string, std::string>& vars) const;
};

// The judge prompts. Defaults are embedded; a directory of <name>.txt files
// (e.g. statement_extraction.txt) overrides individual templates.
class PromptLibrary {
 public:
  static PromptLibrary defaults();
  static PromptLibrary load(const std::filesystem::path& dir);

  const PromptTemplate& get(PromptId id) const;
  std::vector<const PromptTemplate*> all() const;

 private:
  std::map<PromptId, PromptTemplate> templates_;
};

}  // namespace rageval
