#include "ncs/code_analysis.hpp"

#include <algorithm>
#include <cctype>

namespace ncs {

namespace {

bool is_python_keyword_tok(const std::string& t) {
  static const std::set<std::string> kw = {
      "False", "None", "True",   "and",      "as",     "assert", "async",
      "await", "break", "class", "continue", "def",    "del",    "elif",
      "else",  "except", "finally", "for",   "from",   "global", "if",
      "import", "in",   "is",    "lambda",   "nonlocal", "not",  "or",
      "pass",  "raise", "return", "try",     "while",  "with",   "yield"};
  return kw.count(t) != 0;
}

bool is_java_keyword_tok(const std::string& t) {
  static const std::set<std::string> kw = {
      "abstract", "assert",    "boolean",  "break",     "byte",     "case",
      "catch",    "char",      "class",    "const",     "continue", "default",
      "do",       "double",    "else",     "enum",      "extends",  "final",
      "finally",  "float",     "for",      "goto",      "if",       "implements",
      "import",   "instanceof", "int",     "interface", "long",     "native",
      "new",      "package",   "private",  "protected", "public",   "return",
      "short",    "static",    "strictfp", "super",     "switch",   "synchronized",
      "this",     "throw",     "throws",   "transient", "try",      "void",
      "volatile", "while",     "true",     "false",     "null"};
  return kw.count(t) != 0;
}

bool keyword_tok(const std::string& t, Language lang) {
  return lang == Language::python ? is_python_keyword_tok(t)
                                  : is_java_keyword_tok(t);
}

bool punct_is(const Tok& t, const char* s) {
  return t.kind == TokKind::punct && t.text == s;
}

bool ident_is(const Tok& t, const char* s) {
  return t.kind == TokKind::identifier && t.text == s;
}

// True when toks[i] is "=" acting as assignment (not ==, <=, >=, !=, +=...).
bool is_assignment_eq(const std::vector<Tok>& toks, std::size_t i) {
  if (!punct_is(toks[i], "=")) return false;
  if (i + 1 < toks.size() && punct_is(toks[i + 1], "=")) return false;
  if (i > 0 && toks[i - 1].kind == TokKind::punct) {
    const std::string& p = toks[i - 1].text;
    if (p == "=" || p == "<" || p == ">" || p == "!") return false;
  }
  return true;
}

// "x +=", "x -=" etc: identifier, single arithmetic punct, "=".
bool is_augmented_target(const std::vector<Tok>& toks, std::size_t i) {
  if (i + 2 >= toks.size()) return false;
  if (toks[i + 1].kind != TokKind::punct) return false;
  const std::string& p = toks[i + 1].text;
  if (p != "+" && p != "-" && p != "*" && p != "/" && p != "%" && p != "&" &&
      p != "|" && p != "^") {
    return false;
  }
  return punct_is(toks[i + 2], "=");
}

void collect_python_variables(const std::vector<Tok>& toks,
                              IdentifierInventory& inv,
                              std::set<std::string>& vars) {
  const std::size_t n = toks.size();
  int depth = 0;
  bool in_def_params = false;
  int def_param_depth = 0;
  bool in_for_target = false;
  std::size_t stmt_start = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const Tok& t = toks[i];
    if (t.kind == TokKind::punct) {
      const char c = t.text[0];
      if (c == '(' || c == '[' || c == '{') ++depth;
      if (c == ')' || c == ']' || c == '}') {
        --depth;
        if (in_def_params && depth < def_param_depth) in_def_params = false;
      }
    }
    if (t.kind == TokKind::newline && depth == 0) {
      stmt_start = i + 1;
      in_for_target = false;
      continue;
    }
    if (punct_is(t, ";") && depth == 0) {
      stmt_start = i + 1;
      in_for_target = false;
      continue;
    }
    if (punct_is(t, ":") && depth == 0) {
      stmt_start = i + 1;
      in_for_target = false;
      continue;
    }
    if (ident_is(t, "def")) {
      // skip the name, then mark the parameter list
      if (i + 2 < n && toks[i + 1].kind == TokKind::identifier &&
          punct_is(toks[i + 2], "(")) {
        in_def_params = true;
        def_param_depth = depth + 1;
      }
      continue;
    }
    if (ident_is(t, "lambda") && depth == 0) {
      // lambda params up to ':'
      std::size_t j = i + 1;
      while (j < n && !punct_is(toks[j], ":")) {
        if (toks[j].kind == TokKind::identifier &&
            !keyword_tok(toks[j].text, Language::python)) {
          vars.insert(toks[j].text);
        }
        ++j;
      }
      i = j;
      continue;
    }
    if (ident_is(t, "for")) {
      in_for_target = true;
      continue;
    }
    if (ident_is(t, "in")) {
      in_for_target = false;
      continue;
    }
    if (ident_is(t, "as") && i + 1 < n &&
        toks[i + 1].kind == TokKind::identifier) {
      vars.insert(toks[i + 1].text);
      ++i;
      continue;
    }
    if (t.kind != TokKind::identifier || keyword_tok(t.text, Language::python)) {
      continue;
    }

    if (in_def_params && depth == def_param_depth) {
      // an identifier directly after '(' ',' '*' or '**' is a parameter
      const Tok& prev = toks[i - 1];
      if (punct_is(prev, "(") || punct_is(prev, ",") || punct_is(prev, "*")) {
        vars.insert(t.text);
      }
      continue;
    }
    if (in_for_target) {
      vars.insert(t.text);
      continue;
    }
    // assignment target: statement-level identifier not behind a dot,
    // followed (possibly through tuple commas) by '=' before other ops
    if (depth == 0 && i > stmt_start &&
        punct_is(toks[i - 1], ".")) {
      continue;  // attribute access, not a local variable binding
    }
    if (depth == 0) {
      if ((i + 1 < n && is_assignment_eq(toks, i + 1)) ||
          is_augmented_target(toks, i)) {
        bool dotted = i > 0 && punct_is(toks[i - 1], ".");
        if (!dotted) vars.insert(t.text);
        continue;
      }
      // tuple target "a, b = ..." : identifier, comma(s), then '='
      if (i + 1 < n && punct_is(toks[i + 1], ",")) {
        std::size_t j = i + 1;
        bool ok = true;
        std::vector<std::string> pending = {t.text};
        while (j + 1 < n && punct_is(toks[j], ",") &&
               toks[j + 1].kind == TokKind::identifier &&
               !keyword_tok(toks[j + 1].text, Language::python)) {
          pending.push_back(toks[j + 1].text);
          j += 2;
        }
        if (j < n && is_assignment_eq(toks, j)) {
          for (auto& v : pending) vars.insert(v);
          i = j;
          continue;
        }
        (void)ok;
      }
    }
  }
}

void collect_java_variables(const std::vector<Tok>& toks,
                            IdentifierInventory& inv,
                            std::set<std::string>& vars,
                            std::size_t params_begin, std::size_t params_end) {
  const std::size_t n = toks.size();
  // parameters: inside the method's parameter list an identifier directly
  // before ',' or ')' (at list depth) is a parameter name
  if (params_begin < params_end) {
    int depth = 0;
    for (std::size_t i = params_begin; i < params_end; ++i) {
      const Tok& t = toks[i];
      if (t.kind == TokKind::punct) {
        const char c = t.text[0];
        if (c == '(' || c == '<' || c == '[') ++depth;
        if (c == ')' || c == '>' || c == ']') --depth;
      }
      if (t.kind == TokKind::identifier && depth == 0 && i + 1 < n) {
        if ((punct_is(toks[i + 1], ",") ||
             (punct_is(toks[i + 1], ")") && i + 1 == params_end)) &&
            !keyword_tok(t.text, Language::java)) {
          vars.insert(t.text);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Tok& t = toks[i];
    if (t.kind != TokKind::identifier || keyword_tok(t.text, Language::java)) {
      continue;
    }
    bool dotted = i > 0 && punct_is(toks[i - 1], ".");
    if (dotted) continue;
    if ((i + 1 < n && is_assignment_eq(toks, i + 1)) ||
        is_augmented_target(toks, i)) {
      vars.insert(t.text);
      continue;
    }
    // declaration without initializer "Type name ;" and for-each "Type x :"
    if (i > 0 && toks[i - 1].kind == TokKind::identifier && i + 1 < n &&
        (punct_is(toks[i + 1], ";") || punct_is(toks[i + 1], ":"))) {
      vars.insert(t.text);
    }
  }
}

// first method header: identifier '(' ... ')' '{', name not a control word
std::optional<std::size_t> find_java_method_name(const std::vector<Tok>& toks) {
  const std::size_t n = toks.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (toks[i].kind != TokKind::identifier) continue;
    if (keyword_tok(toks[i].text, Language::java)) continue;
    if (!punct_is(toks[i + 1], "(")) continue;
    int depth = 0;
    std::size_t j = i + 1;
    for (; j < n; ++j) {
      if (punct_is(toks[j], "(")) ++depth;
      if (punct_is(toks[j], ")")) {
        --depth;
        if (depth == 0) break;
      }
    }
    if (j + 1 < n && punct_is(toks[j + 1], "{")) return i;
  }
  return std::nullopt;
}

}  // namespace

SeparatorStyle default_separator(Language lang) {
  return lang == Language::python ? SeparatorStyle::snake : SeparatorStyle::camel;
}

std::string extended_name(const std::string& identifier,
                          const std::string& trigger, SeparatorStyle style) {
  if (style == SeparatorStyle::snake) return identifier + "_" + trigger;
  std::string cap = trigger;
  cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
  return identifier + cap;
}

IdentifierInventory extract_inventory(const std::string& code, Language lang) {
  const auto toks = lex(code, lang);
  IdentifierInventory inv;
  std::set<std::string> vars;

  for (const Tok& t : toks) {
    if (t.kind == TokKind::identifier && !keyword_tok(t.text, lang)) {
      inv.all_identifiers.insert(t.text);
    }
  }

  if (lang == Language::python) {
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      if (ident_is(toks[i], "def") && toks[i + 1].kind == TokKind::identifier) {
        inv.function_name = toks[i + 1].text;
        break;
      }
    }
    collect_python_variables(toks, inv, vars);
  } else {
    std::size_t params_begin = 0, params_end = 0;
    auto name_idx = find_java_method_name(toks);
    if (name_idx) {
      inv.function_name = toks[*name_idx].text;
      params_begin = *name_idx + 2;
      int depth = 1;
      std::size_t j = params_begin;
      for (; j < toks.size(); ++j) {
        if (punct_is(toks[j], "(")) ++depth;
        if (punct_is(toks[j], ")")) {
          --depth;
          if (depth == 0) break;
        }
      }
      params_end = j;
    }
    collect_java_variables(toks, inv, vars, params_begin, params_end);
  }

  if (inv.function_name) vars.erase(*inv.function_name);
  for (const std::string& v : vars) {
    std::size_t count = 0;
    for (const Tok& t : toks) {
      if (t.kind == TokKind::identifier && t.text == v) ++count;
    }
    inv.variables[v] = count;
  }
  return inv;
}

std::string select_injection_identifier(const IdentifierInventory& inv,
                                        Rng& rng) {
  std::optional<std::string> least;
  if (!inv.variables.empty()) {
    std::size_t best = SIZE_MAX;
    for (const auto& [name, count] : inv.variables) {
      if (count < best) {
        best = count;
        least = name;  // map iterates in lexicographic order, first wins ties
      }
    }
  }
  if (!inv.function_name && !least) {
    throw std::runtime_error("no injectable identifier");
  }
  if (!inv.function_name) return *least;
  if (!least) return *inv.function_name;
  return rng.next_bool() ? *inv.function_name : *least;
}

std::string rename_identifier(const std::string& code, const RenamePlan& plan) {
  if (plan.trigger.empty()) throw std::runtime_error("empty trigger token");
  if (!is_identifier(plan.trigger) ||
      std::isdigit(static_cast<unsigned char>(plan.trigger[0]))) {
    throw std::runtime_error("trigger is not identifier-legal: " + plan.trigger);
  }
  // snake/camel implies python/java lexing respectively
  const Language lang = plan.separator_style == SeparatorStyle::snake
                            ? Language::python
                            : Language::java;
  const auto toks = lex(code, lang);
  const std::string new_name =
      extended_name(plan.identifier, plan.trigger, plan.separator_style);

  std::size_t occurrences = 0;
  for (const Tok& t : toks) {
    if (t.kind != TokKind::identifier) continue;
    if (t.text == new_name) {
      throw std::runtime_error("rename collision: " + new_name +
                               " already present");
    }
    if (t.text == plan.identifier) ++occurrences;
  }
  if (occurrences == 0) {
    throw std::runtime_error("identifier not found: " + plan.identifier);
  }

  std::string out;
  out.reserve(code.size() + occurrences * (new_name.size() - plan.identifier.size()));
  std::size_t pos = 0;
  for (const Tok& t : toks) {
    if (t.kind == TokKind::identifier && t.text == plan.identifier) {
      out.append(code, pos, t.begin - pos);
      out.append(new_name);
      pos = t.end;
    }
  }
  out.append(code, pos, code.size() - pos);
  return out;
}

const std::string& deadcode_snippet() {
  static const std::string snippet =
      "import logging\n"
      "for i in range(0):\n"
      "    logging.info(\"Test message:aaaaa\")\n";
  return snippet;
}

std::string inject_deadcode_trigger(const std::string& code, Language lang) {
  if (lang != Language::python) {
    throw std::runtime_error("baseline trigger is python-only");
  }
  // find the header line of the first def and the indent of its body
  const auto toks = lex(code, lang);
  std::size_t def_pos = std::string::npos;
  for (const Tok& t : toks) {
    if (t.kind == TokKind::identifier && t.text == "def") {
      def_pos = t.begin;
      break;
    }
  }
  if (def_pos == std::string::npos) {
    throw std::runtime_error("no function body to inject into");
  }
  // end of the header: first ':' at paren depth 0 after the def
  int depth = 0;
  std::size_t colon_end = std::string::npos;
  for (const Tok& t : toks) {
    if (t.begin < def_pos) continue;
    if (t.kind == TokKind::punct) {
      const char c = t.text[0];
      if (c == '(' || c == '[' || c == '{') ++depth;
      if (c == ')' || c == ']' || c == '}') --depth;
      if (c == ':' && depth == 0) {
        colon_end = t.end;
        break;
      }
    }
  }
  if (colon_end == std::string::npos) {
    throw std::runtime_error("malformed function header");
  }

  std::size_t header_indent = 0;
  {
    std::size_t line_start = code.rfind('\n', def_pos);
    line_start = line_start == std::string::npos ? 0 : line_start + 1;
    header_indent = def_pos - line_start;
  }

  // body indent from the first non-blank line after the header, else +4
  std::string body_indent(header_indent + 4, ' ');
  std::string rest;
  std::size_t after = colon_end;
  std::size_t nl = code.find('\n', after);
  bool inline_body = false;
  if (nl == std::string::npos) {
    inline_body = code.find_first_not_of(" \t", after) != std::string::npos;
    rest = inline_body ? code.substr(code.find_first_not_of(" \t", after)) : "";
  } else if (code.find_first_not_of(" \t", after) < nl) {
    inline_body = true;
    rest = code.substr(code.find_first_not_of(" \t", after));
  } else {
    std::size_t p = nl + 1;
    while (p < code.size()) {
      std::size_t line_end = code.find('\n', p);
      if (line_end == std::string::npos) line_end = code.size();
      std::size_t first = code.find_first_not_of(" \t", p);
      if (first != std::string::npos && first < line_end) {
        body_indent = code.substr(p, first - p);
        break;
      }
      p = line_end + 1;
    }
  }

  std::string trigger_block;
  {
    const std::string& snip = deadcode_snippet();
    std::size_t p = 0;
    while (p < snip.size()) {
      std::size_t e = snip.find('\n', p);
      trigger_block += body_indent + snip.substr(p, e - p) + "\n";
      p = e + 1;
    }
  }

  std::string out = code.substr(0, colon_end);
  out += "\n" + trigger_block;
  if (inline_body) {
    out += body_indent + rest;
  } else {
    out += code.substr(nl + 1);
  }
  return out;
}

}  // namespace ncs
