#include "ncs/tokenize.hpp"

#include <cctype>
#include <fstream>

namespace ncs {

namespace {

const char* kStopWords[] = {
    "a",       "about",  "above",  "after",   "again",  "against", "all",
    "am",      "an",     "and",    "any",     "are",    "as",      "at",
    "be",      "because", "been",  "before",  "being",  "below",   "between",
    "both",    "but",    "by",     "can",     "cannot", "could",   "did",
    "do",      "does",   "doing",  "down",    "during", "each",    "few",
    "for",     "from",   "further", "had",    "has",    "have",    "having",
    "he",      "her",    "here",   "hers",    "herself", "him",    "himself",
    "his",     "how",    "i",      "if",      "in",     "into",    "is",
    "it",      "its",    "itself", "just",    "me",     "more",    "most",
    "my",      "myself", "no",     "nor",     "not",    "now",     "of",
    "off",     "on",     "once",   "only",    "or",     "other",   "our",
    "ours",    "ourselves", "out", "over",    "own",    "same",    "she",
    "should",  "so",     "some",   "such",    "than",   "that",    "the",
    "their",   "theirs", "them",   "themselves", "then", "there",  "these",
    "they",    "this",   "those",  "through", "to",     "too",     "under",
    "until",   "up",     "very",   "was",     "we",     "were",    "what",
    "when",    "where",  "which",  "while",   "who",    "whom",    "why",
    "will",    "with",   "would",  "you",     "your",   "yours",   "yourself",
    "yourselves", "whether", "is"};

const char* kPythonKeywords[] = {
    "false",  "none",   "true",   "and",    "as",     "assert", "async",
    "await",  "break",  "class",  "continue", "def",  "del",    "elif",
    "else",   "except", "finally", "for",   "from",   "global", "if",
    "import", "in",     "is",     "lambda", "nonlocal", "not",  "or",
    "pass",   "raise",  "return", "try",    "while",  "with",   "yield",
    "self",   "print"};

const char* kJavaKeywords[] = {
    "abstract", "assert",    "boolean",  "break",     "byte",     "case",
    "catch",    "char",      "class",    "const",     "continue", "default",
    "do",       "double",    "else",     "enum",      "extends",  "final",
    "finally",  "float",     "for",      "goto",      "if",       "implements",
    "import",   "instanceof", "int",     "interface", "long",     "native",
    "new",      "package",   "private",  "protected", "public",   "return",
    "short",    "static",    "strictfp", "super",     "switch",   "synchronized",
    "this",     "throw",     "throws",   "transient", "try",      "void",
    "volatile", "while",     "true",     "false",     "null",     "var"};

}  // namespace

AnalysisConfig default_analysis_config() {
  AnalysisConfig cfg;
  for (const char* w : kStopWords) cfg.stop_words.insert(w);
  for (const char* w : kPythonKeywords) cfg.python_keywords.insert(w);
  for (const char* w : kJavaKeywords) cfg.java_keywords.insert(w);
  cfg.min_token_len = 1;
  return cfg;
}

std::set<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read word list: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.pop_back();
    }
    std::size_t start = 0;
    while (start < line.size() &&
           std::isspace(static_cast<unsigned char>(line[start]))) {
      ++start;
    }
    if (start < line.size()) words.insert(line.substr(start));
  }
  return words;
}

std::vector<std::string> tokenize_comment(const std::string& text,
                                          const AnalysisConfig& cfg) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      if (static_cast<int>(cur.size()) >= cfg.min_token_len &&
          !cfg.stop_words.count(cur)) {
        out.push_back(cur);
      }
      cur.clear();
    }
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> split_subtokens(const std::string& identifier) {
  std::vector<std::string> parts;
  std::string cur;
  const std::size_t n = identifier.size();
  auto flush = [&] {
    if (!cur.empty()) {
      parts.push_back(cur);
      cur.clear();
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    const char c = identifier[i];
    if (c == '_') {
      flush();
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      const bool prev_lower =
          i > 0 && (std::islower(static_cast<unsigned char>(identifier[i - 1])) ||
                    std::isdigit(static_cast<unsigned char>(identifier[i - 1])));
      const bool next_lower =
          i + 1 < n && std::islower(static_cast<unsigned char>(identifier[i + 1]));
      const bool prev_upper =
          i > 0 && std::isupper(static_cast<unsigned char>(identifier[i - 1]));
      if (prev_lower || (prev_upper && next_lower)) flush();
    }
    cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  flush();
  return parts;
}

std::vector<std::string> tokenize_code(const std::string& code, Language lang,
                                       const AnalysisConfig& cfg) {
  std::vector<std::string> out;
  const auto& keywords = cfg.keywords(lang);
  for (const Tok& tok : lex(code, lang)) {
    if (tok.kind != TokKind::identifier) continue;
    for (const std::string& sub : split_subtokens(tok.text)) {
      if (static_cast<int>(sub.size()) < cfg.min_token_len) continue;
      if (keywords.count(sub)) continue;
      out.push_back(sub);
    }
  }
  return out;
}

}  // namespace ncs
