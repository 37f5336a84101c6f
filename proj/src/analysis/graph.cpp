#include <stdexcept>

#include "ccx/analysis/analysis.hpp"
#include "ccx/engine/printer.hpp"

namespace ccx::analysis {

namespace {

using engine::Goal;
using engine::GoalKind;

struct Walker {
  RuleGraph& g;
  std::string from;

  void walk(const Goal* goal, bool negated, bool in_disjunction) {
    if (goal == nullptr) return;
    switch (goal->kind) {
      case GoalKind::conjunction:
        walk(goal->left.get(), negated, in_disjunction);
        walk(goal->right.get(), negated, in_disjunction);
        return;
      case GoalKind::disjunction:
        walk(goal->left.get(), negated, true);
        walk(goal->right.get(), negated, true);
        return;
      case GoalKind::negation:
        walk(goal->left.get(), true, in_disjunction);
        return;
      case GoalKind::call: {
        const auto to = goal->callee.to_string();
        g.nodes.emplace(to, NodeKind::predicate);
        g.edges.insert({from, to, negated, in_disjunction});
        return;
      }
      case GoalKind::compare:
      case GoalKind::evaluate:
      case GoalKind::unify: {
        const auto to = engine::to_string(goal->term);
        g.nodes.emplace(to, NodeKind::leaf);
        g.edges.insert({from, to, negated, in_disjunction});
        return;
      }
      default:
        return;
    }
  }
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Reads a quoted DOT id starting at `pos`; advances past it.
std::string read_quoted(std::string_view line, std::size_t& pos) {
  if (pos >= line.size() || line[pos] != '"') throw std::runtime_error("expected quoted id");
  std::string out;
  for (++pos; pos < line.size(); ++pos) {
    if (line[pos] == '\\' && pos + 1 < line.size()) {
      out += line[++pos];
    } else if (line[pos] == '"') {
      ++pos;
      return out;
    } else {
      out += line[pos];
    }
  }
  throw std::runtime_error("unterminated quoted id");
}

}  // namespace

std::size_t RuleGraph::predicate_count() const {
  std::size_t n = 0;
  for (const auto& [id, kind] : nodes) n += kind == NodeKind::predicate ? 1 : 0;
  return n;
}

std::size_t RuleGraph::leaf_count() const { return nodes.size() - predicate_count(); }

RuleGraph build_rule_graph(const Program& kb) {
  RuleGraph g;
  for (const auto& pred : kb.predicates()) {
    const auto from = pred.indicator.to_string();
    g.nodes.emplace(from, NodeKind::predicate);
    Walker w{g, from};
    for (const auto& clause : *pred.clauses) w.walk(clause->goal.get(), false, false);
  }
  for (const auto& pi : kb.dynamic_decls()) g.nodes.emplace(pi.to_string(), NodeKind::predicate);
  return g;
}

std::string emit_dot(const RuleGraph& g) {
  std::string out = "digraph rules {\n";
  for (const auto& [id, kind] : g.nodes) {
    out += "  " + quote(id);
    if (kind == NodeKind::leaf) out += " [shape=box]";
    out += ";\n";
  }
  for (const auto& e : g.edges) {
    out += "  " + quote(e.from) + " -> " + quote(e.to);
    if (e.negated && e.in_disjunction) {
      out += " [style=dashed, label=\"or\"]";
    } else if (e.negated) {
      out += " [style=dashed]";
    } else if (e.in_disjunction) {
      out += " [label=\"or\"]";
    }
    out += ";\n";
  }
  out += "}\n";
  return out;
}

RuleGraph parse_dot(std::string_view dot) {
  RuleGraph g;
  std::size_t start = 0;
  bool opened = false;
  bool closed = false;
  int line_no = 0;
  while (start < dot.size()) {
    auto end = dot.find('\n', start);
    if (end == std::string_view::npos) end = dot.size();
    std::string_view line = dot.substr(start, end - start);
    start = end + 1;
    ++line_no;
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error("DOT line " + std::to_string(line_no) + ": " + why);
    };
    if (!opened) {
      if (line != "digraph rules {") fail("expected 'digraph rules {'");
      opened = true;
      continue;
    }
    if (line == "}") {
      closed = true;
      continue;
    }
    if (closed) fail("content after closing brace");
    try {
      std::size_t pos = 0;
      const auto first = read_quoted(line, pos);
      auto rest = std::string(line.substr(pos));
      if (rest.rfind(" -> ", 0) == 0) {
        pos += 4;
        const auto second = read_quoted(line, pos);
        rest = std::string(line.substr(pos));
        Edge e{first, second, false, false};
        if (rest == ";") {
        } else if (rest == " [style=dashed];") {
          e.negated = true;
        } else if (rest == " [label=\"or\"];") {
          e.in_disjunction = true;
        } else if (rest == " [style=dashed, label=\"or\"];") {
          e.negated = e.in_disjunction = true;
        } else {
          fail("unexpected edge attributes");
        }
        if (!g.nodes.count(first) || !g.nodes.count(second)) fail("edge endpoint is not a declared node");
        g.edges.insert(e);
      } else if (rest == ";") {
        g.nodes.emplace(first, NodeKind::predicate);
      } else if (rest == " [shape=box];") {
        g.nodes.emplace(first, NodeKind::leaf);
      } else {
        fail("unexpected node statement");
      }
    } catch (const std::runtime_error& e) {
      if (std::string_view(e.what()).rfind("DOT line", 0) == 0) throw;
      fail(e.what());
    }
  }
  if (!opened || !closed) throw std::runtime_error("DOT text is not a complete digraph");
  return g;
}

}  // namespace ccx::analysis
