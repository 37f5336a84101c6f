#include "ccx/engine/printer.hpp"

#include <cctype>

#include "ccx/engine/operators.hpp"

namespace ccx::engine {

namespace {

bool is_symbol_char(char c) {
  constexpr std::string_view kSymbols = "#$&*+-./:<=>?@^~\\";
  return kSymbols.find(c) != std::string_view::npos;
}

bool needs_quotes(const std::string& name) {
  if (name.empty()) return true;
  if (name == "!" || name == ";") return false;
  if (std::islower(static_cast<unsigned char>(name[0]))) {
    for (char c : name) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return true;
    }
    return false;
  }
  for (char c : name) {
    if (!is_symbol_char(c)) return true;
  }
  return false;
}

std::string quote_atom(const std::string& name) {
  if (!needs_quotes(name)) return name;
  std::string out = "'";
  for (char c : name) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += "'";
  return out;
}

bool is_operator_atom(const std::string& name) { return prefix_op(name) || infix_op(name); }

class Printer {
 public:
  void print(const Term& t, int max_prec) {
    switch (t.kind()) {
      case TermKind::number:
        out_ += t.number().to_string();
        return;
      case TermKind::var:
        out_ += t.name().empty() ? "_G" + std::to_string(t.var_id()) : t.name();
        return;
      case TermKind::atom:
        if (is_operator_atom(t.name()) && max_prec < 1200) {
          out_ += "(" + quote_atom(t.name()) + ")";
        } else {
          out_ += quote_atom(t.name());
        }
        return;
      case TermKind::compound:
        print_compound(t, max_prec);
        return;
    }
  }

  std::string take() { return std::move(out_); }

 private:
  void print_compound(const Term& t, int max_prec) {
    const auto& name = t.name();
    if (t.arity() == 2) {
      if (const auto def = infix_op(name)) {
        const bool paren = def->priority > max_prec;
        if (paren) out_ += "(";
        print(t.arg(0), def->left_max());
        if (name == ",") {
          out_ += ", ";
        } else {
          out_ += " " + quote_atom(name) + " ";
        }
        print(t.arg(1), def->right_max());
        if (paren) out_ += ")";
        return;
      }
    }
    if (t.arity() == 1) {
      if (const auto def = prefix_op(name); def && name != "-" && name != "+") {
        const bool paren = def->priority > max_prec;
        if (paren) out_ += "(";
        out_ += quote_atom(name) + " ";
        print(t.arg(0), def->right_max());
        if (paren) out_ += ")";
        return;
      }
    }
    out_ += quote_atom(name) + "(";
    for (std::size_t i = 0; i < t.arity(); ++i) {
      if (i > 0) out_ += ", ";
      print(t.arg(i), 999);
    }
    out_ += ")";
  }

  std::string out_;
};

}  // namespace

std::string to_string(const Term& term) {
  Printer p;
  p.print(term, 1200);
  return p.take();
}

std::string to_source(const Clause& clause) {
  Printer p;
  p.print(clause.to_term(), 1200);
  return p.take() + ".";
}

std::string to_source(const Program& program) {
  std::string out;
  for (const auto& pi : program.dynamic_decls()) {
    out += ":- dynamic " + quote_atom(pi.name) + "/" + std::to_string(pi.arity) + ".\n";
  }
  for (const auto& pred : program.predicates()) {
    for (const auto& clause : *pred.clauses) out += to_source(*clause) + "\n";
  }
  for (const auto& d : program.directives()) {
    Printer p;
    p.print(Term::compound(":-", {d.term}), 1200);
    out += p.take() + ".\n";
  }
  return out;
}

}  // namespace ccx::engine
