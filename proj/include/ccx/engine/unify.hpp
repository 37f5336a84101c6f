#pragma once

#include <cstdint>
#include <map>

#include "ccx/engine/term.hpp"

namespace ccx::engine {

/// Variable id to bound term. Bound terms may mention other variables of the
/// same scope.
using Substitution = std::map<std::uint32_t, Term>;

/// Extends `s` to a most general unifier of `a` and `b`, both read in the
/// scope of `s`. No occurs check. On failure returns false and leaves `s`
/// unchanged.
bool unify(const Term& a, const Term& b, Substitution& s);

/// Applies `s` exhaustively. Not defined for cyclic bindings.
Term substitute(const Substitution& s, const Term& term);

}  // namespace ccx::engine
