#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "ncs/lexer.hpp"
#include "ncs/rng.hpp"

namespace ncs {

// Function name, variables with whole-token occurrence counts, and every
// identifier appearing in the snippet. Variables are parameters,
// assignment targets and loop variables; called names appear only in
// all_identifiers.
struct IdentifierInventory {
  std::optional<std::string> function_name;
  std::map<std::string, std::size_t> variables;
  std::set<std::string> all_identifiers;
};

enum class SeparatorStyle { snake, camel };

struct RenamePlan {
  std::string sample_id;
  std::string identifier;
  std::string trigger;
  SeparatorStyle separator_style = SeparatorStyle::snake;
};

SeparatorStyle default_separator(Language lang);

// identifier + "_" + trigger, or identifier + Capitalized(trigger)
std::string extended_name(const std::string& identifier,
                          const std::string& trigger, SeparatorStyle style);

IdentifierInventory extract_inventory(const std::string& code, Language lang);

// Least frequent variable (ties lexicographic), then a fair coin between
// it and the function name; the surviving side when only one exists.
std::string select_injection_identifier(const IdentifierInventory& inv,
                                        Rng& rng);

// Whole-token rename of every occurrence; no other byte changes.
std::string rename_identifier(const std::string& code, const RenamePlan& plan);

// Baseline attack: fixed logging snippet inserted as the first statements
// of the function body. Python only.
std::string inject_deadcode_trigger(const std::string& code, Language lang);

const std::string& deadcode_snippet();

}  // namespace ncs
