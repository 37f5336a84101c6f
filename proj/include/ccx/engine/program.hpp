#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccx/engine/term.hpp"

namespace ccx::engine {

struct SourcePos {
  std::size_t line = 0;
  std::size_t column = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class GoalKind : std::uint8_t {
  truth,
  fail,
  cut,
  conjunction,
  disjunction,
  negation,
  unify,
  compare,
  evaluate,     // is/2
  assert_clause,  // assert/1, assertz/1
  retract,
  retractall,
  call,       // user predicate
  meta_call,  // a variable in goal position
};

enum class CompareOp : std::uint8_t { lt, gt, le, ge, eq, ne };

struct Goal;
using GoalPtr = std::shared_ptr<const Goal>;

/// Compiled body tree. `term` keeps the source form of the goal.
struct Goal {
  GoalKind kind = GoalKind::truth;
  Term term;
  CompareOp op = CompareOp::eq;
  PredicateIndicator callee;
  GoalPtr left;   // conjunction, disjunction, negation
  GoalPtr right;  // conjunction, disjunction
};

struct Clause {
  Term head;
  Term body;  // `true` for facts
  GoalPtr goal;
  std::uint32_t var_count = 0;
  std::vector<std::string> var_names;  // indexed by variable id
  SourcePos pos;

  [[nodiscard]] bool is_fact() const { return body.is_atom() && body.name() == "true"; }
  /// `Head :- Body`, or just `Head` for facts.
  [[nodiscard]] Term to_term() const;
};
using ClausePtr = std::shared_ptr<const Clause>;

/// A goal together with the variables it owns: a directive, a query, or the
/// target of a meta-call.
struct Query {
  Term term;
  GoalPtr goal;
  std::uint32_t var_count = 0;
  std::vector<std::string> var_names;
  SourcePos pos;
};

/// Ordered clause database with dynamic declarations and load-time
/// directives.
///
/// Predicate groups keep first-appearance order and clauses keep source
/// order. Each group's clause list is copy-on-write so that a running
/// resolution can iterate a stable snapshot while assert/retract modify the
/// database.
class Program {
 public:
  using ClauseList = std::vector<ClausePtr>;

  struct Predicate {
    PredicateIndicator indicator;
    std::shared_ptr<const ClauseList> clauses;
  };

  void add_clause(ClausePtr clause);
  void declare_dynamic(const PredicateIndicator& pi);
  void add_directive(Query directive);

  /// Creates an empty clause group if none exists yet.
  void ensure_predicate(const PredicateIndicator& pi);
  /// Removes the clause with this identity. Returns false if not present.
  bool remove_clause(const PredicateIndicator& pi, const Clause* clause);
  /// Appends every clause, declaration and directive of `other`, keeping
  /// existing clauses first (no redefinition replacement).
  void append(const Program& other);

  [[nodiscard]] const Predicate* find(const PredicateIndicator& pi) const;
  /// Snapshot of a predicate's clauses; null when the predicate has no group.
  [[nodiscard]] std::shared_ptr<const ClauseList> clauses(const PredicateIndicator& pi) const;
  [[nodiscard]] bool is_dynamic(const PredicateIndicator& pi) const;
  /// Defined by clauses (possibly all retracted) or declared dynamic.
  [[nodiscard]] bool exists(const PredicateIndicator& pi) const { return find(pi) != nullptr || is_dynamic(pi); }

  [[nodiscard]] const std::vector<Predicate>& predicates() const { return predicates_; }
  [[nodiscard]] const std::vector<PredicateIndicator>& dynamic_decls() const { return dynamic_; }
  [[nodiscard]] const std::vector<Query>& directives() const { return directives_; }
  /// Every clause passed to add_clause, in insertion order. Retracted
  /// clauses stay in this list; it records loading history.
  [[nodiscard]] const ClauseList& load_order() const { return load_order_; }
  /// Number of load-order clauses read before directive `i`.
  [[nodiscard]] std::size_t clauses_before_directive(std::size_t i) const { return directive_marks_.at(i); }
  [[nodiscard]] std::size_t clause_count() const;

  /// Structural equality: groups in order, clause terms, dynamic
  /// declarations and directive terms.
  friend bool operator==(const Program& a, const Program& b);

 private:
  std::vector<Predicate> predicates_;
  std::unordered_map<PredicateIndicator, std::size_t> index_;
  std::vector<PredicateIndicator> dynamic_;
  std::vector<Query> directives_;
  std::vector<std::size_t> directive_marks_;
  ClauseList load_order_;
};

}  // namespace ccx::engine
