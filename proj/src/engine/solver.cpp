#include "ccx/engine/solver.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "ccx/engine/parser.hpp"
#include "ccx/engine/printer.hpp"

namespace ccx::engine {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::existence: return "existence";
    case ErrorKind::instantiation: return "instantiation";
    case ErrorKind::type: return "type";
    case ErrorKind::resource_limit: return "resource_limit";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

std::optional<ErrorKind> error_kind_from_string(std::string_view text) {
  for (auto k : {ErrorKind::existence, ErrorKind::instantiation, ErrorKind::type, ErrorKind::resource_limit,
                 ErrorKind::parse}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

SolveOutcome SolveOutcome::make_error(ErrorKind kind, std::string message, std::uint64_t steps) {
  SolveOutcome out;
  out.status = SolveStatus::error;
  out.error = kind;
  out.message = std::move(message);
  out.steps_used = steps;
  return out;
}

std::string describe(const SolveOutcome& outcome) {
  switch (outcome.status) {
    case SolveStatus::proved: return "yes";
    case SolveStatus::failed: return "no";
    case SolveStatus::error: return "error(" + std::string(to_string(*outcome.error)) + ")";
  }
  return "error";
}

namespace {

using Node = Term::Node;

// Native recursion happens only through nested negation; this caps it well
// below what a default thread stack can hold.
constexpr std::uint32_t kMaxNegationNesting = 2'000;

struct SolveError {
  ErrorKind kind;
  std::string message;
};

// A term in the context of a variable frame: variable `v` of `node` lives in
// store slot `frame + v.var_id`.
struct Ref {
  const Node* node = nullptr;
  std::uint32_t frame = 0;
};

struct Cont;
using ContPtr = std::shared_ptr<Cont>;

// Persistent list of pending goals.
struct Cont {
  const Goal* goal = nullptr;
  std::uint32_t frame = 0;
  std::uint32_t cut_barrier = 0;
  std::uint32_t depth = 0;
  ContPtr next;

  Cont(const Goal* g, std::uint32_t f, std::uint32_t b, std::uint32_t d, ContPtr n)
      : goal(g), frame(f), cut_barrier(b), depth(d), next(std::move(n)) {}
  Cont(const Cont&) = delete;
  Cont& operator=(const Cont&) = delete;

  // Unlinks iteratively so that long goal lists cannot overflow the stack.
  ~Cont() {
    ContPtr n = std::move(next);
    while (n && n.use_count() == 1) {
      ContPtr after = std::move(n->next);
      n = std::move(after);
    }
  }
};

struct ChoicePoint {
  enum class Kind : std::uint8_t { clauses, alternative };

  Kind kind = Kind::alternative;
  std::size_t trail_mark = 0;
  std::size_t store_mark = 0;
  ContPtr cont;
  std::uint32_t depth = 0;
  // clauses
  std::shared_ptr<const Program::ClauseList> clauses;
  std::size_t next = 0;
  Ref goal;
  // alternative
  const Goal* alt = nullptr;
  std::uint32_t frame = 0;
  std::uint32_t cut_barrier = 0;
};

class Machine {
 public:
  Machine(Program& kb, const Limits& limits) : kb_(kb), limits_(limits) {}

  SolveOutcome run_query(const Query& query) {
    try {
      const std::uint32_t frame = alloc(query.var_count);
      ContPtr cont = std::make_shared<Cont>(query.goal.get(), frame, 0, 0, nullptr);
      if (!run(std::move(cont), 0)) {
        SolveOutcome out;
        out.status = SolveStatus::failed;
        out.steps_used = steps_;
        return out;
      }
      SolveOutcome out;
      out.status = SolveStatus::proved;
      out.steps_used = steps_;
      for (std::uint32_t i = 0; i < query.var_count && i < query.var_names.size(); ++i) {
        const auto& name = query.var_names[i];
        if (name.empty() || name.front() == '_') continue;
        out.bindings.push_back({name, resolve_slot(frame + i)});
      }
      return out;
    } catch (const SolveError& e) {
      return SolveOutcome::make_error(e.kind, e.message, steps_);
    }
  }

 private:
  struct Slot {
    const Node* node = nullptr;
    std::uint32_t frame = 0;
  };

  // -- store and trail ------------------------------------------------------

  std::uint32_t alloc(std::uint32_t n) {
    const auto frame = static_cast<std::uint32_t>(store_.size());
    store_.resize(store_.size() + n);
    return frame;
  }

  Ref deref(Ref r) const {
    while (r.node->kind == TermKind::var) {
      const Slot& s = store_[r.frame + r.node->var_id];
      if (s.node == nullptr) return r;
      r = {s.node, s.frame};
    }
    return r;
  }

  static std::uint32_t slot_of(Ref unbound) { return unbound.frame + unbound.node->var_id; }

  void bind(std::uint32_t slot, Ref value) {
    store_[slot] = {value.node, value.frame};
    trail_.push_back(slot);
  }

  void undo(std::size_t trail_mark, std::size_t store_mark) {
    while (trail_.size() > trail_mark) {
      const auto slot = trail_.back();
      trail_.pop_back();
      if (slot < store_.size()) store_[slot] = {};
    }
    store_.resize(store_mark);
  }

  bool unify(Ref a, Ref b) {
    std::vector<std::pair<Ref, Ref>> work{{a, b}};
    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      x = deref(x);
      y = deref(y);
      const bool xv = x.node->kind == TermKind::var;
      const bool yv = y.node->kind == TermKind::var;
      if (xv && yv) {
        const auto sx = slot_of(x);
        const auto sy = slot_of(y);
        if (sx == sy) continue;
        if (sx > sy) {
          bind(sx, y);
        } else {
          bind(sy, x);
        }
        continue;
      }
      if (xv) {
        bind(slot_of(x), y);
        continue;
      }
      if (yv) {
        bind(slot_of(y), x);
        continue;
      }
      if (x.node->kind != y.node->kind) return false;
      switch (x.node->kind) {
        case TermKind::atom:
          if (x.node->name != y.node->name) return false;
          break;
        case TermKind::number:
          if (!(x.node->value == y.node->value)) return false;
          break;
        case TermKind::compound:
          if (x.node->name != y.node->name || x.node->args.size() != y.node->args.size()) return false;
          for (std::size_t i = x.node->args.size(); i-- > 0;) {
            work.push_back({{x.node->args[i].node(), x.frame}, {y.node->args[i].node(), y.frame}});
          }
          break;
        case TermKind::var:
          break;
      }
    }
    return true;
  }

  // Copies a runtime term into a standalone Term. Unbound variables become
  // fresh variables numbered by first occurrence; their store slots are
  // appended to `slots` in the same order.
  Term materialize(Ref r, std::vector<std::uint32_t>& slots, std::unordered_map<std::uint32_t, std::uint32_t>& ids) {
    r = deref(r);
    switch (r.node->kind) {
      case TermKind::var: {
        const auto slot = slot_of(r);
        auto [it, inserted] = ids.emplace(slot, static_cast<std::uint32_t>(slots.size()));
        if (inserted) slots.push_back(slot);
        return Term::var("_G" + std::to_string(it->second), it->second);
      }
      case TermKind::atom:
        return Term::atom(r.node->name);
      case TermKind::number:
        return Term::number(r.node->value);
      case TermKind::compound: {
        std::vector<Term> args;
        args.reserve(r.node->args.size());
        for (const auto& a : r.node->args) args.push_back(materialize({a.node(), r.frame}, slots, ids));
        return Term::compound(r.node->name, std::move(args));
      }
    }
    return Term::atom("[]");
  }

  Term materialize(Ref r, std::vector<std::uint32_t>& slots) {
    std::unordered_map<std::uint32_t, std::uint32_t> ids;
    return materialize(r, slots, ids);
  }

  Term resolve_slot(std::uint32_t slot) {
    const Slot& s = store_[slot];
    if (s.node == nullptr) return Term::var("_G" + std::to_string(slot), slot);
    std::vector<std::uint32_t> slots;
    Term t = materialize({s.node, s.frame}, slots);
    // Rename remaining variables after their store slots so that distinct
    // bindings sharing a variable print the same name.
    return rename_vars(t, slots);
  }

  static Term rename_vars(const Term& t, const std::vector<std::uint32_t>& slots) {
    switch (t.kind()) {
      case TermKind::var: {
        const auto slot = slots[t.var_id()];
        return Term::var("_G" + std::to_string(slot), slot);
      }
      case TermKind::compound: {
        std::vector<Term> args;
        for (const auto& a : t.args()) args.push_back(rename_vars(a, slots));
        return Term::compound(t.name(), std::move(args));
      }
      default:
        return t;
    }
  }

  // -- control --------------------------------------------------------------

  void count_step() {
    if (steps_ >= limits_.max_steps) {
      throw SolveError{ErrorKind::resource_limit, "step limit of " + std::to_string(limits_.max_steps) + " exhausted"};
    }
    ++steps_;
  }

  void check_depth(std::uint32_t depth) const {
    if (depth > limits_.max_depth) {
      throw SolveError{ErrorKind::resource_limit, "depth limit of " + std::to_string(limits_.max_depth) + " exceeded"};
    }
  }

  bool run(ContPtr cont, std::size_t base) {
    for (;;) {
      if (!cont) return true;
      if (!step(cont) && !backtrack(base, cont)) return false;
    }
  }

  bool backtrack(std::size_t base, ContPtr& cont) {
    while (cps_.size() > base) {
      ChoicePoint cp = std::move(cps_.back());
      cps_.pop_back();
      undo(cp.trail_mark, cp.store_mark);
      if (cp.kind == ChoicePoint::Kind::alternative) {
        cont = std::make_shared<Cont>(cp.alt, cp.frame, cp.cut_barrier, cp.depth, std::move(cp.cont));
        return true;
      }
      if (try_clauses(cp.clauses, cp.next, cp.goal, cp.depth, cp.cont, cont)) return true;
    }
    return false;
  }

  bool try_clauses(const std::shared_ptr<const Program::ClauseList>& list, std::size_t start, Ref goal,
                   std::uint32_t depth, const ContPtr& next, ContPtr& cont) {
    const auto n = list->size();
    for (std::size_t i = start; i < n; ++i) {
      const Clause& clause = *(*list)[i];
      const std::size_t tm = trail_.size();
      const std::size_t sm = store_.size();
      const std::uint32_t frame = alloc(clause.var_count);
      if (unify({clause.head.node(), frame}, goal)) {
        const auto barrier = static_cast<std::uint32_t>(cps_.size());
        if (i + 1 < n) {
          ChoicePoint cp;
          cp.kind = ChoicePoint::Kind::clauses;
          cp.trail_mark = tm;
          cp.store_mark = sm;
          cp.cont = next;
          cp.depth = depth;
          cp.clauses = list;
          cp.next = i + 1;
          cp.goal = goal;
          cps_.push_back(std::move(cp));
        }
        cont = clause.is_fact() ? next : std::make_shared<Cont>(clause.goal.get(), frame, barrier, depth + 1, next);
        return true;
      }
      undo(tm, sm);
    }
    return false;
  }

  bool solve_negated(const Goal* goal, std::uint32_t frame, std::uint32_t depth) {
    if (++negation_nesting_ > kMaxNegationNesting) {
      throw SolveError{ErrorKind::resource_limit, "negation nesting limit exceeded"};
    }
    const std::size_t base = cps_.size();
    const std::size_t tm = trail_.size();
    const std::size_t sm = store_.size();
    const auto barrier = static_cast<std::uint32_t>(base);
    const bool proved = run(std::make_shared<Cont>(goal, frame, barrier, depth, nullptr), base);
    cps_.resize(base);
    undo(tm, sm);
    --negation_nesting_;
    return proved;
  }

  // Executes the first pending goal. Returns false on failure.
  bool step(ContPtr& cont) {
    count_step();
    const Goal* g = cont->goal;
    const std::uint32_t frame = cont->frame;
    const std::uint32_t barrier = cont->cut_barrier;
    const std::uint32_t depth = cont->depth;
    ContPtr next = cont->next;
    check_depth(depth);

    auto arg = [&](std::size_t i) { return Ref{g->term.arg(i).node(), frame}; };

    switch (g->kind) {
      case GoalKind::truth:
        cont = std::move(next);
        return true;
      case GoalKind::fail:
        return false;
      case GoalKind::cut:
        cps_.resize(std::min<std::size_t>(cps_.size(), barrier));
        cont = std::move(next);
        return true;
      case GoalKind::conjunction: {
        auto rest = std::make_shared<Cont>(g->right.get(), frame, barrier, depth, std::move(next));
        cont = std::make_shared<Cont>(g->left.get(), frame, barrier, depth, std::move(rest));
        return true;
      }
      case GoalKind::disjunction: {
        ChoicePoint cp;
        cp.kind = ChoicePoint::Kind::alternative;
        cp.trail_mark = trail_.size();
        cp.store_mark = store_.size();
        cp.cont = next;
        cp.depth = depth;
        cp.alt = g->right.get();
        cp.frame = frame;
        cp.cut_barrier = barrier;
        cps_.push_back(std::move(cp));
        cont = std::make_shared<Cont>(g->left.get(), frame, barrier, depth, std::move(next));
        return true;
      }
      case GoalKind::negation:
        if (solve_negated(g->left.get(), frame, depth + 1)) return false;
        cont = std::move(next);
        return true;
      case GoalKind::unify:
        if (!unify(arg(0), arg(1))) return false;
        cont = std::move(next);
        return true;
      case GoalKind::compare:
        if (!compare(g->op, eval(arg(0)), eval(arg(1)))) return false;
        cont = std::move(next);
        return true;
      case GoalKind::evaluate: {
        Term value = Term::number(eval(arg(1)));
        const Ref r{value.node(), 0};
        keep_terms_.push_back(std::move(value));
        if (!unify(arg(0), r)) return false;
        cont = std::move(next);
        return true;
      }
      case GoalKind::assert_clause:
        do_assert(arg(0));
        cont = std::move(next);
        return true;
      case GoalKind::retract:
        if (!do_retract(arg(0))) return false;
        cont = std::move(next);
        return true;
      case GoalKind::retractall:
        do_retractall(arg(0));
        cont = std::move(next);
        return true;
      case GoalKind::call:
        return call(Ref{g->term.node(), frame}, g->callee, depth, next, cont);
      case GoalKind::meta_call:
        return meta_call(Ref{g->term.node(), frame}, depth, next, cont);
    }
    return false;
  }

  bool call(Ref goal, const PredicateIndicator& pi, std::uint32_t depth, const ContPtr& next, ContPtr& cont) {
    check_depth(depth + 1);
    auto list = kb_.clauses(pi);
    if (!list) {
      if (kb_.is_dynamic(pi)) return false;
      throw SolveError{ErrorKind::existence, "unknown procedure " + pi.to_string()};
    }
    return try_clauses(list, 0, goal, depth, next, cont);
  }

  bool meta_call(Ref goal, std::uint32_t depth, const ContPtr& next, ContPtr& cont) {
    const Ref r = deref(goal);
    if (r.node->kind == TermKind::var) throw SolveError{ErrorKind::instantiation, "unbound goal"};
    if (r.node->kind == TermKind::number) throw SolveError{ErrorKind::type, "goal is not callable"};
    std::vector<std::uint32_t> slots;
    Term t = materialize(r, slots);
    GoalPtr compiled;
    try {
      compiled = compile_goal(t, defined_names());
    } catch (const ParseError& e) {
      throw SolveError{ErrorKind::type, e.detail()};
    }
    const std::uint32_t frame = alloc(static_cast<std::uint32_t>(slots.size()));
    for (std::size_t i = 0; i < slots.size(); ++i) {
      store_[frame + i] = {var_node_for(slots[i]), 0};
      trail_.push_back(static_cast<std::uint32_t>(frame + i));
    }
    keep_terms_.push_back(t);
    keep_goals_.push_back(compiled);
    cont = std::make_shared<Cont>(compiled.get(), frame, static_cast<std::uint32_t>(cps_.size()), depth + 1, next);
    return true;
  }

  // A variable node that, in frame 0, addresses store slot `slot`.
  const Node* var_node_for(std::uint32_t slot) {
    Term v = Term::var("_", slot);
    const Node* node = v.node();
    keep_terms_.push_back(std::move(v));
    return node;
  }

  DefinedSet defined_names() const {
    DefinedSet out;
    for (const auto& p : kb_.predicates()) out.insert(p.indicator);
    return out;
  }

  // -- arithmetic -----------------------------------------------------------

  Number eval(Ref r) {
    r = deref(r);
    switch (r.node->kind) {
      case TermKind::var:
        throw SolveError{ErrorKind::instantiation, "arithmetic on an unbound variable"};
      case TermKind::number:
        return r.node->value;
      case TermKind::atom:
        throw SolveError{ErrorKind::type, "not evaluable: " + r.node->name + "/0"};
      case TermKind::compound:
        break;
    }
    const auto& name = r.node->name;
    const auto& args = r.node->args;
    auto sub = [&](std::size_t i) { return eval({args[i].node(), r.frame}); };
    try {
      if (args.size() == 2) {
        if (name == "+") return sub(0) + sub(1);
        if (name == "-") return sub(0) - sub(1);
        if (name == "*") return sub(0) * sub(1);
        if (name == "/") return sub(0) / sub(1);
        if (name == "//") return Number::int_div(sub(0), sub(1));
        if (name == "mod") return Number::mod(sub(0), sub(1));
        if (name == "min") {
          auto a = sub(0);
          auto b = sub(1);
          return b < a ? b : a;
        }
        if (name == "max") {
          auto a = sub(0);
          auto b = sub(1);
          return a < b ? b : a;
        }
      } else if (args.size() == 1) {
        if (name == "-") return -sub(0);
        if (name == "+") return sub(0);
        if (name == "abs") {
          auto a = sub(0);
          return a < Number(0) ? -a : a;
        }
      }
    } catch (const std::domain_error& e) {
      throw SolveError{ErrorKind::type, std::string("evaluation error: ") + e.what()};
    } catch (const std::invalid_argument& e) {
      throw SolveError{ErrorKind::type, std::string("type error: ") + e.what()};
    }
    throw SolveError{ErrorKind::type, "not evaluable: " + name + "/" + std::to_string(args.size())};
  }

  static bool compare(CompareOp op, const Number& a, const Number& b) {
    switch (op) {
      case CompareOp::lt: return a < b;
      case CompareOp::gt: return a > b;
      case CompareOp::le: return a <= b;
      case CompareOp::ge: return a >= b;
      case CompareOp::eq: return a == b;
      case CompareOp::ne: return !(a == b);
    }
    return false;
  }

  // -- database -------------------------------------------------------------

  // Splits `Head :- Body` (or a bare head) and validates the head.
  std::pair<Ref, Ref> split_clause(Ref r, Ref true_ref) {
    r = deref(r);
    Ref head = r;
    Ref body = true_ref;
    if (r.node->kind == TermKind::compound && r.node->name == ":-" && r.node->args.size() == 2) {
      head = deref({r.node->args[0].node(), r.frame});
      body = {r.node->args[1].node(), r.frame};
    }
    if (head.node->kind == TermKind::var) throw SolveError{ErrorKind::instantiation, "unbound clause head"};
    if (head.node->kind == TermKind::number) throw SolveError{ErrorKind::type, "clause head is not callable"};
    return {head, body};
  }

  static PredicateIndicator indicator(Ref head) { return {head.node->name, head.node->args.size()}; }

  void do_assert(Ref r) {
    const Ref checked = deref(r);
    if (checked.node->kind == TermKind::var) throw SolveError{ErrorKind::instantiation, "assert of unbound term"};
    if (checked.node->kind == TermKind::number) throw SolveError{ErrorKind::type, "assert of a number"};
    split_clause(checked, true_ref());
    std::vector<std::uint32_t> slots;
    Term t = materialize(checked, slots);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < slots.size(); ++i) names.push_back("_G" + std::to_string(i));
    try {
      kb_.add_clause(make_clause(t, static_cast<std::uint32_t>(slots.size()), std::move(names), {}, defined_names()));
    } catch (const ParseError& e) {
      throw SolveError{ErrorKind::type, e.detail()};
    }
  }

  bool do_retract(Ref r) {
    auto [head, body] = split_clause(r, true_ref());
    const auto pi = indicator(head);
    const auto list = kb_.clauses(pi);
    if (!list) return false;
    for (const auto& clause : *list) {
      const std::size_t tm = trail_.size();
      const std::size_t sm = store_.size();
      const std::uint32_t frame = alloc(clause->var_count);
      if (unify({clause->head.node(), frame}, head) && unify({clause->body.node(), frame}, body)) {
        kb_.remove_clause(pi, clause.get());
        graveyard_.push_back(clause);
        return true;
      }
      undo(tm, sm);
    }
    return false;
  }

  void do_retractall(Ref r) {
    const Ref head = deref(r);
    if (head.node->kind == TermKind::var) throw SolveError{ErrorKind::instantiation, "retractall of unbound term"};
    if (head.node->kind == TermKind::number) throw SolveError{ErrorKind::type, "retractall of a number"};
    const auto pi = indicator(head);
    if (const auto list = kb_.clauses(pi)) {
      for (const auto& clause : *list) {
        const std::size_t tm = trail_.size();
        const std::size_t sm = store_.size();
        const std::uint32_t frame = alloc(clause->var_count);
        if (unify({clause->head.node(), frame}, head)) {
          kb_.remove_clause(pi, clause.get());
          graveyard_.push_back(clause);
        }
        undo(tm, sm);
      }
    }
    kb_.ensure_predicate(pi);
  }

  Ref true_ref() {
    if (true_term_.empty()) true_term_.push_back(Term::atom("true"));
    return {true_term_.front().node(), 0};
  }

  Program& kb_;
  Limits limits_;
  std::uint64_t steps_ = 0;
  std::uint32_t negation_nesting_ = 0;
  std::vector<Slot> store_;
  std::vector<std::uint32_t> trail_;
  std::vector<ChoicePoint> cps_;
  // Nodes referenced from the store must outlive the solve.
  std::vector<Term> keep_terms_;
  std::vector<GoalPtr> keep_goals_;
  std::vector<ClausePtr> graveyard_;
  std::vector<Term> true_term_;
};

std::uint32_t var_count_of(const Term& t) {
  std::uint32_t n = 0;
  for_each_var(t, [&](const Term& v) { n = std::max(n, v.var_id() + 1); });
  return n;
}

}  // namespace

SolveOutcome solve(Program& kb, const Query& goal, const Limits& limits) {
  Machine machine(kb, limits);
  return machine.run_query(goal);
}

LoadResult consult(const Program& source, const Limits& limits) {
  LoadResult result;
  Program& kb = result.kb;
  for (const auto& pi : source.dynamic_decls()) kb.declare_dynamic(pi);
  const auto& order = source.load_order();
  std::size_t next = 0;
  for (std::size_t i = 0; i < source.directives().size(); ++i) {
    const auto mark = source.clauses_before_directive(i);
    while (next < mark && next < order.size()) kb.add_clause(order[next++]);
    const Query& directive = source.directives()[i];
    kb.add_directive(directive);
    auto outcome = solve(kb, directive, limits);
    const std::string where = "directive at line " + std::to_string(directive.pos.line) + " (" +
                              to_string(directive.term) + ")";
    if (outcome.is_error()) {
      if (outcome.error == ErrorKind::existence || outcome.error == ErrorKind::parse) {
        result.fatal = std::move(outcome);
        return result;
      }
      result.warnings.push_back(where + ": " + describe(outcome) + ": " + outcome.message);
    } else if (outcome.failed()) {
      result.warnings.push_back(where + ": goal failed");
    }
  }
  while (next < order.size()) kb.add_clause(order[next++]);
  return result;
}

SolveOutcome apply_dynamic(Program& kb, DynamicOp op, const Term& argument) {
  const char* name = "assertz";
  switch (op) {
    case DynamicOp::assert_clause: name = "assert"; break;
    case DynamicOp::assertz: name = "assertz"; break;
    case DynamicOp::retract: name = "retract"; break;
    case DynamicOp::retractall: name = "retractall"; break;
  }
  const Term goal = Term::compound(name, {argument});
  Query q{goal, compile_goal(goal), var_count_of(argument), {}, {}};
  return solve(kb, q, {});
}

}  // namespace ccx::engine
