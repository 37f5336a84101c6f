#include "ccx/engine/unify.hpp"

#include <utility>
#include <vector>

namespace ccx::engine {

namespace {

Term walk(const Substitution& s, Term t) {
  while (t.is_var()) {
    auto it = s.find(t.var_id());
    if (it == s.end()) break;
    t = it->second;
  }
  return t;
}

}  // namespace

bool unify(const Term& a, const Term& b, Substitution& s) {
  Substitution out = s;
  std::vector<std::pair<Term, Term>> work{{a, b}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    x = walk(out, x);
    y = walk(out, y);
    if (x.is_var() && y.is_var() && x.var_id() == y.var_id()) continue;
    if (x.is_var()) {
      out.emplace(x.var_id(), y);
      continue;
    }
    if (y.is_var()) {
      out.emplace(y.var_id(), x);
      continue;
    }
    if (x.kind() != y.kind()) return false;
    if (x.is_number()) {
      if (!(x.number() == y.number())) return false;
      continue;
    }
    if (x.name() != y.name() || x.arity() != y.arity()) return false;
    for (std::size_t i = x.arity(); i-- > 0;) work.emplace_back(x.arg(i), y.arg(i));
  }
  s = std::move(out);
  return true;
}

Term substitute(const Substitution& s, const Term& term) {
  const Term t = walk(s, term);
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(substitute(s, a));
  return Term::compound(t.name(), std::move(args));
}

}  // namespace ccx::engine
