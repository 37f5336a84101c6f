#pragma once

#include <string>

#include "ccx/engine/program.hpp"

namespace ccx::engine {

/// Operator-aware rendering that the reader accepts back unchanged. Atoms
/// that need quotes are quoted; variables print by display name.
std::string to_string(const Term& term);

/// `Head :- Body.` or `Head.` on a single line.
std::string to_source(const Clause& clause);

/// Dynamic declarations, then clauses grouped by predicate, then
/// directives.
std::string to_source(const Program& program);

}  // namespace ccx::engine
