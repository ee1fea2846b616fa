#pragma once

#include <set>
#include <string>
#include <vector>

#include "ncs/lexer.hpp"

namespace ncs {

struct AnalysisConfig {
  std::set<std::string> stop_words;
  std::set<std::string> python_keywords;
  std::set<std::string> java_keywords;
  int min_token_len = 1;

  const std::set<std::string>& keywords(Language lang) const {
    return lang == Language::python ? python_keywords : java_keywords;
  }
};

// Built-in English stop words (~120) and per-language reserved words plus
// literal keywords. Each can be replaced by loading a word-per-line file.
AnalysisConfig default_analysis_config();
std::set<std::string> load_word_list(const std::string& path);

// Lowercase, split on non-alphanumeric runs, drop stop words and tokens
// shorter than min_token_len. Order preserved.
std::vector<std::string> tokenize_comment(const std::string& text,
                                          const AnalysisConfig& cfg);

// Lex the snippet, keep identifiers only, split them on underscores and
// camelCase boundaries, lowercase, drop keywords. Duplicates preserved.
std::vector<std::string> tokenize_code(const std::string& code, Language lang,
                                       const AnalysisConfig& cfg);

// underscore + camelCase sub-token split, lowercased
std::vector<std::string> split_subtokens(const std::string& identifier);

}  // namespace ncs
