#include "ncs/lexer.hpp"

#include <cctype>

namespace ncs {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Scans a python string literal starting at i (quote or prefix already
// consumed by caller up to the opening quote). Returns offset one past the
// closing quote.
std::size_t scan_python_string(std::string_view s, std::size_t i) {
  const char quote = s[i];
  const bool triple = i + 2 < s.size() && s[i + 1] == quote && s[i + 2] == quote;
  std::size_t j = i + (triple ? 3 : 1);
  while (j < s.size()) {
    if (s[j] == '\\') {
      j += 2;
      continue;
    }
    if (triple) {
      if (s[j] == quote && j + 2 < s.size() && s[j + 1] == quote &&
          s[j + 2] == quote) {
        return j + 3;
      }
      ++j;
    } else {
      if (s[j] == quote) return j + 1;
      if (s[j] == '\n') throw LexError("unterminated string literal", i);
      ++j;
    }
  }
  throw LexError("unterminated string literal", i);
}

std::size_t scan_java_string(std::string_view s, std::size_t i) {
  const char quote = s[i];
  std::size_t j = i + 1;
  while (j < s.size()) {
    if (s[j] == '\\') {
      j += 2;
      continue;
    }
    if (s[j] == quote) return j + 1;
    if (s[j] == '\n') throw LexError("unterminated string literal", i);
    ++j;
  }
  throw LexError("unterminated string literal", i);
}

}  // namespace

Language parse_language(std::string_view name) {
  if (name == "python") return Language::python;
  if (name == "java") return Language::java;
  throw std::runtime_error("unsupported language: " + std::string(name));
}

std::string_view language_name(Language lang) {
  return lang == Language::python ? "python" : "java";
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s[0])) return false;
  for (char c : s) {
    if (!ident_cont(c)) return false;
  }
  return true;
}

std::vector<Tok> lex(std::string_view code, Language lang) {
  std::vector<Tok> out;
  std::size_t i = 0;
  const std::size_t n = code.size();
  int paren_depth = 0;
  while (i < n) {
    const char c = code[i];
    if (c == '\n') {
      if (lang == Language::python && paren_depth == 0) {
        out.push_back({TokKind::newline, "\n", i, i + 1});
      }
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    // comments
    if (lang == Language::python && c == '#') {
      while (i < n && code[i] != '\n') ++i;
      continue;
    }
    if (lang == Language::java && c == '/' && i + 1 < n) {
      if (code[i + 1] == '/') {
        while (i < n && code[i] != '\n') ++i;
        continue;
      }
      if (code[i + 1] == '*') {
        std::size_t j = i + 2;
        while (j + 1 < n && !(code[j] == '*' && code[j + 1] == '/')) ++j;
        if (j + 1 >= n) throw LexError("unterminated block comment", i);
        i = j + 2;
        continue;
      }
    }
    // string literals (python string prefixes like r"", b"", f"" included)
    if (c == '"' || c == '\'') {
      std::size_t end = lang == Language::python ? scan_python_string(code, i)
                                                 : scan_java_string(code, i);
      out.push_back({TokKind::string, std::string(code.substr(i, end - i)), i, end});
      i = end;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && ident_cont(code[j])) ++j;
      std::string text(code.substr(i, j - i));
      // python string prefix immediately followed by a quote
      if (lang == Language::python && j < n && (code[j] == '"' || code[j] == '\'') &&
          text.size() <= 2) {
        bool prefix = true;
        for (char p : text) {
          char lp = static_cast<char>(std::tolower(static_cast<unsigned char>(p)));
          if (lp != 'r' && lp != 'b' && lp != 'f' && lp != 'u') prefix = false;
        }
        if (prefix) {
          std::size_t end = scan_python_string(code, j);
          out.push_back({TokKind::string, std::string(code.substr(i, end - i)), i, end});
          i = end;
          continue;
        }
      }
      out.push_back({TokKind::identifier, std::move(text), i, j});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(code[i + 1])))) {
      std::size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(code[j])) ||
                       code[j] == '.' || code[j] == '_')) {
        ++j;
      }
      out.push_back({TokKind::number, std::string(code.substr(i, j - i)), i, j});
      i = j;
      continue;
    }
    if (!std::isprint(static_cast<unsigned char>(c))) {
      // unlexable byte; callers count these via the skipped-punct convention
      ++i;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++paren_depth;
    if ((c == ')' || c == ']' || c == '}') && paren_depth > 0) --paren_depth;
    out.push_back({TokKind::punct, std::string(1, c), i, i + 1});
    ++i;
  }
  return out;
}

}  // namespace ncs
