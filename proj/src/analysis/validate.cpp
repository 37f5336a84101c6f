#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "ccx/analysis/analysis.hpp"
#include "ccx/engine/parser.hpp"

namespace ccx::analysis {

namespace {

using engine::Goal;
using engine::GoalKind;
using engine::Term;
using engine::TermKind;

void for_each_call(const Goal* g, const std::function<void(const Goal&)>& visit) {
  if (g == nullptr) return;
  switch (g->kind) {
    case GoalKind::conjunction:
    case GoalKind::disjunction:
      for_each_call(g->left.get(), visit);
      for_each_call(g->right.get(), visit);
      return;
    case GoalKind::negation:
      for_each_call(g->left.get(), visit);
      return;
    default:
      visit(*g);
  }
}

// Head indicator of an assert/retractall argument, when it is visible.
std::optional<PredicateIndicator> asserted_indicator(const Goal& g) {
  if (g.kind != GoalKind::assert_clause && g.kind != GoalKind::retractall) return std::nullopt;
  Term t = g.term.arg(0);
  if (t.is(":-", 2)) t = t.arg(0);
  if (!t.is_callable()) return std::nullopt;
  return engine::indicator_of(t);
}

void count_vars(const Term& t, std::unordered_map<std::uint32_t, int>& counts) {
  switch (t.kind()) {
    case TermKind::var:
      ++counts[t.var_id()];
      return;
    case TermKind::compound:
      for (const auto& a : t.args()) count_vars(a, counts);
      return;
    default:
      return;
  }
}

}  // namespace

ValidationReport validate(const Program& kb) {
  ValidationReport report;

  std::set<PredicateIndicator> defined;
  for (const auto& p : kb.predicates()) defined.insert(p.indicator);
  for (const auto& pi : kb.dynamic_decls()) defined.insert(pi);

  std::set<PredicateIndicator> directive_targets;
  for (const auto& d : kb.directives()) {
    for_each_call(d.goal.get(), [&](const Goal& g) {
      if (auto pi = asserted_indicator(g)) {
        defined.insert(*pi);
        directive_targets.insert(*pi);
      }
    });
  }

  std::map<PredicateIndicator, std::vector<CallSite>> undefined;
  std::map<PredicateIndicator, std::set<PredicateIndicator>> callees;
  std::set<PredicateIndicator> called_by_other;

  for (const auto& pred : kb.predicates()) {
    for (const auto& clause : *pred.clauses) {
      for_each_call(clause->goal.get(), [&](const Goal& g) {
        if (g.kind != GoalKind::call) return;
        callees[pred.indicator].insert(g.callee);
        if (g.callee != pred.indicator) called_by_other.insert(g.callee);
        if (!defined.count(g.callee)) undefined[g.callee].push_back({pred.indicator.to_string(), clause->pos});
      });

      std::unordered_map<std::uint32_t, int> counts;
      count_vars(clause->head, counts);
      count_vars(clause->body, counts);
      for (std::uint32_t id = 0; id < clause->var_names.size(); ++id) {
        const auto& name = clause->var_names[id];
        if (name.empty() || name.front() == '_') continue;
        if (counts[id] == 1) report.singleton_variables.push_back({pred.indicator, clause->pos, name});
      }
    }
  }

  std::set<PredicateIndicator> roots;
  for (const auto& d : kb.directives()) {
    for_each_call(d.goal.get(), [&](const Goal& g) {
      if (g.kind != GoalKind::call) return;
      roots.insert(g.callee);
      if (!defined.count(g.callee)) undefined[g.callee].push_back({":- directive", d.pos});
    });
  }
  roots.insert(directive_targets.begin(), directive_targets.end());
  bool has_claim_root = false;
  for (const auto& pi : defined) {
    if (pi.name == "claim_covered") {
      roots.insert(pi);
      has_claim_root = true;
    }
  }
  if (!has_claim_root) {
    for (const auto& pi : defined) {
      if (!called_by_other.count(pi)) roots.insert(pi);
    }
  }

  std::set<PredicateIndicator> reached;
  std::vector<PredicateIndicator> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    const auto pi = stack.back();
    stack.pop_back();
    if (!reached.insert(pi).second) continue;
    for (const auto& c : callees[pi]) stack.push_back(c);
  }
  for (const auto& p : kb.predicates()) {
    if (!reached.count(p.indicator)) report.unreachable_predicates.push_back(p.indicator);
  }

  for (auto& [pi, sites] : undefined) report.undefined_predicates.push_back({pi, std::move(sites)});
  return report;
}

ValidationReport validate_source(std::string_view source) {
  try {
    return validate(engine::parse_program(source));
  } catch (const engine::ParseError& e) {
    ValidationReport report;
    report.parse_ok = false;
    report.parse_error = e.what();
    return report;
  }
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  auto pos = [](const SourcePos& p) { return nlohmann::json{{"line", p.line}, {"column", p.column}}; };
  nlohmann::json undefined = nlohmann::json::array();
  for (const auto& u : r.undefined_predicates) {
    nlohmann::json sites = nlohmann::json::array();
    for (const auto& s : u.call_sites) sites.push_back({{"caller", s.caller}, {"pos", pos(s.pos)}});
    undefined.push_back({{"indicator", u.indicator.to_string()}, {"call_sites", sites}});
  }
  nlohmann::json unreachable = nlohmann::json::array();
  for (const auto& pi : r.unreachable_predicates) unreachable.push_back(pi.to_string());
  nlohmann::json singletons = nlohmann::json::array();
  for (const auto& s : r.singleton_variables) {
    singletons.push_back({{"clause", s.predicate.to_string()}, {"pos", pos(s.pos)}, {"variable", s.variable}});
  }
  j = nlohmann::json{{"parse_ok", r.parse_ok},
                     {"undefined_predicates", undefined},
                     {"unreachable_predicates", unreachable},
                     {"singleton_variables", singletons}};
  if (!r.parse_ok) j["parse_error"] = r.parse_error;
}

std::string summarize(const ValidationReport& r) {
  if (!r.parse_ok) return "parse error: " + r.parse_error + "\n";
  std::string out;
  for (const auto& u : r.undefined_predicates) {
    out += "undefined predicate " + u.indicator.to_string() + " called from";
    for (const auto& s : u.call_sites) out += " " + s.caller + " (line " + std::to_string(s.pos.line) + ")";
    out += "\n";
  }
  for (const auto& pi : r.unreachable_predicates) out += "unreachable predicate " + pi.to_string() + "\n";
  for (const auto& s : r.singleton_variables) {
    out += "singleton variable " + s.variable + " in " + s.predicate.to_string() + " (line " +
           std::to_string(s.pos.line) + ")\n";
  }
  if (out.empty()) out = "no findings\n";
  return out;
}

}  // namespace ccx::analysis
