#include "ccx/engine/operators.hpp"

#include <array>
#include <utility>

namespace ccx::engine {

namespace {

struct Entry {
  std::string_view name;
  OpDef def;
};

constexpr std::array kInfix{
    Entry{":-", {1200, OpType::xfx}},  Entry{"-->", {1200, OpType::xfx}},
    Entry{";", {1100, OpType::xfy}},   Entry{"|", {1100, OpType::xfy}},
    Entry{"->", {1050, OpType::xfy}},  Entry{"*->", {1050, OpType::xfy}},
    Entry{",", {1000, OpType::xfy}},   Entry{"=", {700, OpType::xfx}},
    Entry{"\\=", {700, OpType::xfx}},  Entry{"==", {700, OpType::xfx}},
    Entry{"\\==", {700, OpType::xfx}}, Entry{"@<", {700, OpType::xfx}},
    Entry{"@>", {700, OpType::xfx}},   Entry{"@=<", {700, OpType::xfx}},
    Entry{"@>=", {700, OpType::xfx}},  Entry{"=..", {700, OpType::xfx}},
    Entry{"is", {700, OpType::xfx}},   Entry{"=:=", {700, OpType::xfx}},
    Entry{"=\\=", {700, OpType::xfx}}, Entry{"<", {700, OpType::xfx}},
    Entry{">", {700, OpType::xfx}},    Entry{"=<", {700, OpType::xfx}},
    Entry{">=", {700, OpType::xfx}},   Entry{":", {200, OpType::xfy}},
    Entry{"+", {500, OpType::yfx}},    Entry{"-", {500, OpType::yfx}},
    Entry{"/\\", {500, OpType::yfx}},  Entry{"\\/", {500, OpType::yfx}},
    Entry{"xor", {500, OpType::yfx}},  Entry{"*", {400, OpType::yfx}},
    Entry{"/", {400, OpType::yfx}},    Entry{"//", {400, OpType::yfx}},
    Entry{"rem", {400, OpType::yfx}},  Entry{"mod", {400, OpType::yfx}},
    Entry{"div", {400, OpType::yfx}},  Entry{"<<", {400, OpType::yfx}},
    Entry{">>", {400, OpType::yfx}},   Entry{"**", {200, OpType::xfx}},
    Entry{"^", {200, OpType::xfy}},
};

constexpr std::array kPrefix{
    Entry{":-", {1200, OpType::fx}},       Entry{"?-", {1200, OpType::fx}},
    Entry{"dynamic", {1150, OpType::fx}},  Entry{"discontiguous", {1150, OpType::fx}},
    Entry{"initialization", {1150, OpType::fx}}, Entry{"multifile", {1150, OpType::fx}},
    Entry{"table", {1150, OpType::fx}},    Entry{"\\+", {900, OpType::fy}},
    Entry{"-", {200, OpType::fy}},         Entry{"+", {200, OpType::fy}},
    Entry{"\\", {200, OpType::fy}},
};

template <std::size_t N>
std::optional<OpDef> lookup(const std::array<Entry, N>& table, std::string_view name) {
  for (const auto& e : table) {
    if (e.name == name) return e.def;
  }
  return std::nullopt;
}

}  // namespace

std::optional<OpDef> prefix_op(std::string_view name) { return lookup(kPrefix, name); }
std::optional<OpDef> infix_op(std::string_view name) { return lookup(kInfix, name); }

}  // namespace ccx::engine
