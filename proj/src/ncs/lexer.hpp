#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ncs {

enum class Language { python, java };

Language parse_language(std::string_view name);
std::string_view language_name(Language lang);

enum class TokKind { identifier, number, string, punct, newline };

struct Tok {
  TokKind kind;
  std::string text;
  std::size_t begin = 0;  // byte offset into the snippet
  std::size_t end = 0;
};

struct LexError : std::runtime_error {
  LexError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at byte " + std::to_string(offset)),
        offset(offset) {}
  std::size_t offset;
};

// Token-stream lexer shared by the tokenizer and the identifier analysis.
// Comments are skipped; string and number literals are kept as tokens so
// callers can decide what to drop. Newline tokens are emitted for python
// only (statement boundaries matter there).
std::vector<Tok> lex(std::string_view code, Language lang);

bool is_identifier(std::string_view s);

}  // namespace ncs
