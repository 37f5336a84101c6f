#pragma once

#include <optional>
#include <string_view>

namespace ccx::engine {

enum class OpType : std::uint8_t { xfx, xfy, yfx, fy, fx };

struct OpDef {
  int priority = 0;
  OpType type = OpType::xfx;

  /// Maximum priority allowed for the left / right argument.
  [[nodiscard]] int left_max() const { return type == OpType::yfx ? priority : priority - 1; }
  [[nodiscard]] int right_max() const {
    return (type == OpType::xfy || type == OpType::fy) ? priority : priority - 1;
  }
};

/// The fixed operator table shared by the reader and the printer. It holds
/// the usual standard operators, including ones whose goals are rejected
/// later as unsupported (`->`, `==`, ...), so that such input fails with a
/// named construct rather than a bare syntax error.
std::optional<OpDef> prefix_op(std::string_view name);
std::optional<OpDef> infix_op(std::string_view name);

}  // namespace ccx::engine
