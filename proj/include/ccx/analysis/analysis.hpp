#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ccx/engine/program.hpp"

namespace ccx::analysis {

using engine::PredicateIndicator;
using engine::Program;
using engine::SourcePos;

struct CallSite {
  std::string caller;  // "name/arity", or ":- directive"
  SourcePos pos;

  friend bool operator==(const CallSite&, const CallSite&) = default;
};

struct UndefinedPredicate {
  PredicateIndicator indicator;
  std::vector<CallSite> call_sites;
};

struct SingletonVariable {
  PredicateIndicator predicate;  // of the clause head
  SourcePos pos;                 // of the clause
  std::string variable;
};

struct ValidationReport {
  bool parse_ok = true;
  std::string parse_error;
  std::vector<UndefinedPredicate> undefined_predicates;
  std::vector<PredicateIndicator> unreachable_predicates;
  std::vector<SingletonVariable> singleton_variables;

  /// Undefined predicates are the only findings that make a program fail at
  /// run time; unreachable rules and singletons are informational.
  [[nodiscard]] bool has_findings() const { return !undefined_predicates.empty(); }
};

/// Undefined calls, rules unreachable from the roots, and singleton
/// variables. Roots are the claim_covered predicates of any arity when
/// present, otherwise every predicate no other predicate calls. Predicates
/// called or asserted by directives also count as reachable.
ValidationReport validate(const Program& kb);

/// Parses first; a parse failure gives parse_ok=false and nothing else.
ValidationReport validate_source(std::string_view source);

void to_json(nlohmann::json& j, const ValidationReport& r);

/// Human-readable multi-line summary.
std::string summarize(const ValidationReport& r);

enum class NodeKind : std::uint8_t { predicate, leaf };

struct Edge {
  std::string from;
  std::string to;
  bool negated = false;
  bool in_disjunction = false;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Predicate nodes are named `name/arity`; leaf nodes carry the literal
/// text of a comparison, `is` or unification goal.
struct RuleGraph {
  std::map<std::string, NodeKind> nodes;
  std::set<Edge> edges;

  [[nodiscard]] std::size_t predicate_count() const;
  [[nodiscard]] std::size_t leaf_count() const;

  friend bool operator==(const RuleGraph&, const RuleGraph&) = default;
};

RuleGraph build_rule_graph(const Program& kb);

/// DOT digraph named `rules` with nodes and edges in lexicographic order.
/// Leaves are boxes, negated edges dashed, edges under a disjunction
/// labeled "or".
std::string emit_dot(const RuleGraph& g);

/// Reads text produced by emit_dot. Throws std::runtime_error otherwise.
RuleGraph parse_dot(std::string_view dot);

}  // namespace ccx::analysis
