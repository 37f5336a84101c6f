#include "ccx/engine/term.hpp"

#include <stdexcept>
#include <unordered_set>

namespace ccx::engine {

Term::Term() : Term(atom("true")) {}

Term Term::atom(std::string name) {
  auto node = std::make_shared<Node>();
  node->kind = TermKind::atom;
  node->name = std::move(name);
  return Term(std::move(node));
}

Term Term::number(Number value) {
  auto node = std::make_shared<Node>();
  node->kind = TermKind::number;
  node->value = std::move(value);
  return Term(std::move(node));
}

Term Term::var(std::string name, std::uint32_t id) {
  auto node = std::make_shared<Node>();
  node->kind = TermKind::var;
  node->name = std::move(name);
  node->var_id = id;
  return Term(std::move(node));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) throw std::invalid_argument("compound term needs at least one argument: " + functor);
  auto node = std::make_shared<Node>();
  node->kind = TermKind::compound;
  node->name = std::move(functor);
  node->args = std::move(args);
  return Term(std::move(node));
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
const Number& Term::number() const { return node_->value; }
std::uint32_t Term::var_id() const { return node_->var_id; }
std::span<const Term> Term::args() const { return node_->args; }
std::size_t Term::arity() const { return node_->args.size(); }

bool Term::is(std::string_view name, std::size_t arity) const {
  return is_callable() && node_->name == name && node_->args.size() == arity;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::atom:
      return a.name() == b.name();
    case TermKind::number:
      return a.number() == b.number();
    case TermKind::var:
      return a.var_id() == b.var_id();
    case TermKind::compound:
      if (a.name() != b.name() || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i) {
        if (!(a.arg(i) == b.arg(i))) return false;
      }
      return true;
  }
  return false;
}

PredicateIndicator indicator_of(const Term& term) { return {term.name(), term.arity()}; }

void for_each_var(const Term& term, const std::function<void(const Term&)>& visit) {
  std::unordered_set<std::uint32_t> seen;
  std::vector<const Term*> stack{&term};
  while (!stack.empty()) {
    const Term* t = stack.back();
    stack.pop_back();
    if (t->is_var()) {
      if (seen.insert(t->var_id()).second) visit(*t);
    } else if (t->is_compound()) {
      for (auto it = t->args().rbegin(); it != t->args().rend(); ++it) stack.push_back(&*it);
    }
  }
}

}  // namespace ccx::engine
