#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ccx/engine/number.hpp"

namespace ccx::engine {

enum class TermKind : std::uint8_t { atom, number, var, compound };

/// Immutable logic term with shared structure. Copies are cheap.
///
/// Variables carry an id that is unique within the clause or query that owns
/// them; two variables are the same variable iff their ids are equal. The
/// display name is informational only.
class Term {
 public:
  struct Node;

  /// The atom `true`.
  Term();

  static Term atom(std::string name);
  static Term number(Number value);
  static Term var(std::string name, std::uint32_t id);
  /// Throws std::invalid_argument for an empty argument list: zero-arity
  /// symbols are atoms.
  static Term compound(std::string functor, std::vector<Term> args);

  [[nodiscard]] TermKind kind() const;
  [[nodiscard]] bool is_atom() const { return kind() == TermKind::atom; }
  [[nodiscard]] bool is_number() const { return kind() == TermKind::number; }
  [[nodiscard]] bool is_var() const { return kind() == TermKind::var; }
  [[nodiscard]] bool is_compound() const { return kind() == TermKind::compound; }
  [[nodiscard]] bool is_callable() const { return is_atom() || is_compound(); }

  /// Atom name, compound functor, or variable display name.
  [[nodiscard]] const std::string& name() const;
  [[nodiscard]] const Number& number() const;
  [[nodiscard]] std::uint32_t var_id() const;
  [[nodiscard]] std::span<const Term> args() const;
  [[nodiscard]] std::size_t arity() const;
  [[nodiscard]] const Term& arg(std::size_t i) const { return args()[i]; }

  /// True for an atom or compound with this name and arity.
  [[nodiscard]] bool is(std::string_view name, std::size_t arity) const;

  [[nodiscard]] const Node* node() const { return node_.get(); }

  /// Structural equality; variables compare by id.
  friend bool operator==(const Term& a, const Term& b);

 private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Term::Node {
  TermKind kind;
  std::string name;
  Number value;
  std::uint32_t var_id = 0;
  std::vector<Term> args;
};

/// name/arity pair identifying a predicate.
struct PredicateIndicator {
  std::string name;
  std::size_t arity = 0;

  [[nodiscard]] std::string to_string() const { return name + "/" + std::to_string(arity); }

  friend bool operator==(const PredicateIndicator&, const PredicateIndicator&) = default;
  friend auto operator<=>(const PredicateIndicator&, const PredicateIndicator&) = default;
};

/// Indicator of a callable term. Precondition: term.is_callable().
PredicateIndicator indicator_of(const Term& term);

/// Visits every distinct variable in left-to-right first-occurrence order.
void for_each_var(const Term& term, const std::function<void(const Term&)>& visit);

}  // namespace ccx::engine

template <>
struct std::hash<ccx::engine::PredicateIndicator> {
  std::size_t operator()(const ccx::engine::PredicateIndicator& pi) const noexcept {
    return std::hash<std::string>{}(pi.name) * 31U + pi.arity;
  }
};
