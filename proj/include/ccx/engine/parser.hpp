#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>

#include "ccx/engine/program.hpp"

namespace ccx::engine {

/// Syntax error, or use of a construct outside the supported subset. For
/// the latter `construct()` names the offending construct (e.g.
/// `findall/3`, `list`, `if-then-else (->)`).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourcePos pos, std::string construct = {});

  [[nodiscard]] SourcePos pos() const { return pos_; }
  [[nodiscard]] bool is_unsupported() const { return !construct_.empty(); }
  [[nodiscard]] const std::string& construct() const { return construct_; }
  /// Message without the position prefix.
  [[nodiscard]] const std::string& detail() const { return detail_; }

 private:
  SourcePos pos_;
  std::string construct_;
  std::string detail_;
};

/// Reads clauses, `:- Directive.` and `:- dynamic Name/Arity.` items. A
/// `?- Goal.` item in a program file is treated like a directive.
Program parse_program(std::string_view source);

struct QueryFile {
  Program prelude;
  Query goal;
};

/// Reads a query file: an optional prelude of clauses and directives plus
/// exactly one `?- Goal.`. Without a `?-` item, a final fact-shaped term is
/// taken as the goal.
QueryFile parse_query(std::string_view source);

/// Reads a single goal, with or without a leading `?-` and trailing `.`.
Query parse_goal(std::string_view text);

/// Indicators defined by the surrounding program. Calls to library names
/// outside the supported subset are allowed when the program defines them.
using DefinedSet = std::unordered_set<PredicateIndicator>;

/// Compiles a body term into a goal tree. Throws ParseError for
/// unsupported constructs.
GoalPtr compile_goal(const Term& body, const DefinedSet& defined = {}, SourcePos pos = {});

/// Builds a clause from `Head :- Body` or a fact. Throws ParseError when the
/// head is not callable or names a built-in.
ClausePtr make_clause(const Term& term, std::uint32_t var_count, std::vector<std::string> var_names,
                      SourcePos pos = {}, const DefinedSet& defined = {});

}  // namespace ccx::engine
