#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccx/engine/program.hpp"

namespace ccx::engine {

struct Limits {
  std::uint64_t max_steps = 1'000'000;
  std::uint32_t max_depth = 10'000;
};

enum class SolveStatus : std::uint8_t { proved, failed, error };

enum class ErrorKind : std::uint8_t { existence, instantiation, type, resource_limit, parse };

std::string_view to_string(ErrorKind kind);
std::optional<ErrorKind> error_kind_from_string(std::string_view text);

struct Binding {
  std::string name;
  Term value;
};

/// Result of running one goal: proved (with bindings), finitely failed, or
/// an error of a given kind.
struct SolveOutcome {
  SolveStatus status = SolveStatus::failed;
  std::optional<ErrorKind> error;
  std::string message;
  std::vector<Binding> bindings;  // only when proved
  std::uint64_t steps_used = 0;

  [[nodiscard]] bool proved() const { return status == SolveStatus::proved; }
  [[nodiscard]] bool failed() const { return status == SolveStatus::failed; }
  [[nodiscard]] bool is_error() const { return status == SolveStatus::error; }

  static SolveOutcome make_error(ErrorKind kind, std::string message, std::uint64_t steps = 0);
};

/// "yes", "no" or "error(kind)".
std::string describe(const SolveOutcome& outcome);

/// SLD resolution with leftmost selection and source-order clause trial,
/// stopping at the first proof. `kb` is the dynamic database: assert and
/// retract goals modify it in place.
///
/// Never runs longer than `limits.max_steps` resolution steps; exhausting
/// either limit yields error(resource_limit).
SolveOutcome solve(Program& kb, const Query& goal, const Limits& limits = {});

struct LoadResult {
  Program kb;
  std::vector<std::string> warnings;
  /// Set when a directive raised an existence or parse error.
  std::optional<SolveOutcome> fatal;
};

/// Builds the runtime database from a parsed program, running each
/// directive after the clauses that precede it in the source. Failing
/// directives and non-fatal errors are recorded as warnings.
LoadResult consult(const Program& source, const Limits& limits = {});

enum class DynamicOp : std::uint8_t { assert_clause, assertz, retract, retractall };

/// Applies one database operation outside of a running goal. Proved on
/// success, failed when retract finds no match, error(type) for a
/// non-callable argument.
SolveOutcome apply_dynamic(Program& kb, DynamicOp op, const Term& argument);

}  // namespace ccx::engine
