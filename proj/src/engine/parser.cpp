#include "ccx/engine/parser.hpp"

#include <array>
#include <cctype>
#include <optional>
#include <unordered_map>

#include "ccx/engine/operators.hpp"

namespace ccx::engine {

ParseError::ParseError(const std::string& message, SourcePos pos, std::string construct)
    : std::runtime_error("line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " +
                         message),
      pos_(pos),
      construct_(std::move(construct)),
      detail_(message) {}

namespace {

[[noreturn]] void unsupported(const std::string& construct, SourcePos pos) {
  throw ParseError("unsupported construct: " + construct, pos, construct);
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok : std::uint8_t {
  name,        // atom, possibly an operator
  quoted,      // quoted atom: never an operator, never a solo char
  var,
  number,
  string,      // "..." or `...`
  open,        // (
  open_ct,     // ( directly after a name: functional notation
  close,       // )
  comma,
  bar,
  open_list,   // [
  close_list,  // ]
  open_curly,  // {
  close_curly, // }
  end,         // terminating '.'
  eof,
};

struct Token {
  Tok kind = Tok::eof;
  std::string text;
  Number value;
  SourcePos pos;
  bool layout_before = false;
};

bool is_symbol_char(char c) {
  constexpr std::string_view kSymbols = "#$&*+-./:<=>?@^~\\";
  return kSymbols.find(c) != std::string_view::npos;
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    Token tok;
    tok.layout_before = skip_layout();
    tok.pos = pos();
    if (at_end()) {
      tok.kind = Tok::eof;
      return tok;
    }
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number(tok);
    } else if (std::islower(static_cast<unsigned char>(c))) {
      tok.kind = Tok::name;
      while (!at_end() && is_alnum(peek())) tok.text += get();
    } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      tok.kind = Tok::var;
      while (!at_end() && is_alnum(peek())) tok.text += get();
    } else if (c == '\'') {
      get();
      tok.kind = Tok::quoted;
      tok.text = lex_quoted('\'', tok.pos);
    } else if (c == '"' || c == '`') {
      get();
      tok.kind = Tok::string;
      tok.text = lex_quoted(c, tok.pos);
    } else if (c == '(') {
      get();
      tok.kind = Tok::open;
    } else if (c == ')') {
      get();
      tok.kind = Tok::close;
    } else if (c == ',') {
      get();
      tok.kind = Tok::comma;
    } else if (c == '|') {
      get();
      if (!at_end() && peek() == '|') {
        get();
        tok.kind = Tok::name;
        tok.text = "||";
      } else {
        tok.kind = Tok::bar;
      }
    } else if (c == '[') {
      get();
      tok.kind = Tok::open_list;
    } else if (c == ']') {
      get();
      tok.kind = Tok::close_list;
    } else if (c == '{') {
      get();
      tok.kind = Tok::open_curly;
    } else if (c == '}') {
      get();
      tok.kind = Tok::close_curly;
    } else if (c == '!' || c == ';') {
      get();
      tok.kind = Tok::name;
      tok.text = std::string(1, c);
    } else if (c == '.' && end_follows(1)) {
      get();
      tok.kind = Tok::end;
    } else if (is_symbol_char(c)) {
      tok.kind = Tok::name;
      while (!at_end() && is_symbol_char(peek())) {
        // A '.' that terminates the clause is not part of the symbol atom.
        if (peek() == '.' && end_follows(1) && !tok.text.empty()) break;
        tok.text += get();
      }
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", tok.pos);
    }
    return tok;
  }

 private:
  [[nodiscard]] bool at_end(std::size_t ahead = 0) const { return offset_ + ahead >= src_.size(); }
  [[nodiscard]] char peek(std::size_t ahead = 0) const { return src_[offset_ + ahead]; }
  [[nodiscard]] SourcePos pos() const { return {line_, column_}; }

  char get() {
    const char c = src_[offset_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  // True when the character `ahead` positions away ends a clause: layout,
  // end of input, or a line comment.
  [[nodiscard]] bool end_follows(std::size_t ahead) const {
    if (at_end(ahead)) return true;
    const char n = peek(ahead);
    return std::isspace(static_cast<unsigned char>(n)) != 0 || n == '%';
  }

  bool skip_layout() {
    bool skipped = false;
    while (!at_end()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        get();
        skipped = true;
      } else if (c == '%') {
        while (!at_end() && peek() != '\n') get();
        skipped = true;
      } else if (c == '/' && !at_end(1) && peek(1) == '*') {
        const SourcePos start = pos();
        get();
        get();
        while (!(at_end() || (peek() == '*' && !at_end(1) && peek(1) == '/'))) get();
        if (at_end()) throw ParseError("unterminated block comment", start);
        get();
        get();
        skipped = true;
      } else {
        break;
      }
    }
    return skipped;
  }

  void lex_number(Token& tok) {
    tok.kind = Tok::number;
    std::string digits;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) digits += get();
    if (digits == "0" && !at_end() && peek() == '\'') {
      // 0'c character code
      get();
      if (at_end()) throw ParseError("unterminated character code", tok.pos);
      char ch = get();
      if (ch == '\\' && !at_end()) ch = escape(get(), tok.pos);
      if (ch == '\'' && !at_end() && peek() == '\'') get();
      tok.value = Number(static_cast<std::int64_t>(static_cast<unsigned char>(ch)));
      tok.text = digits;
      return;
    }
    if (!at_end(1) && peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      digits += get();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) digits += get();
    }
    auto value = Number::from_literal(digits);
    if (!value) throw ParseError("malformed number '" + digits + "'", tok.pos);
    if (!at_end() && (peek() == 'e' || peek() == 'E') && digits.find('.') != std::string::npos) {
      std::size_t ahead = 1;
      bool negative = false;
      if (!at_end(ahead) && (peek(ahead) == '+' || peek(ahead) == '-')) {
        negative = peek(ahead) == '-';
        ++ahead;
      }
      if (!at_end(ahead) && std::isdigit(static_cast<unsigned char>(peek(ahead)))) {
        for (std::size_t i = 0; i < ahead; ++i) get();
        std::string exp;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) exp += get();
        if (exp.size() > 4) throw ParseError("exponent out of range", tok.pos);
        Number scale(1);
        for (int i = 0, n = std::stoi(exp); i < n; ++i) scale = scale * Number(10);
        *value = negative ? *value / scale : *value * scale;
        digits += (negative ? "e-" : "e") + exp;
      }
    }
    tok.text = digits;
    tok.value = *value;
  }

  static char escape(char c, SourcePos at) {
    switch (c) {
      case 'n': return '\n';
      case 't': return '\t';
      case 'r': return '\r';
      case 'a': return '\a';
      case 'b': return '\b';
      case 'f': return '\f';
      case 'v': return '\v';
      case '0': return '\0';
      case 'e': return '\x1b';
      case 's': return ' ';
      case '\\':
      case '\'':
      case '"':
      case '`':
        return c;
      default:
        throw ParseError(std::string("unknown escape sequence '\\") + c + "'", at);
    }
  }

  std::string lex_quoted(char quote, SourcePos start) {
    std::string out;
    for (;;) {
      if (at_end()) throw ParseError("unterminated quoted text", start);
      const char c = get();
      if (c == quote) {
        if (!at_end() && peek() == quote) {
          out += get();
          continue;
        }
        return out;
      }
      if (c == '\\') {
        if (at_end()) throw ParseError("unterminated quoted text", start);
        const char e = get();
        if (e == '\n') continue;  // line continuation
        out += escape(e, pos());
        continue;
      }
      out += c;
    }
  }

  std::string_view src_;
  std::size_t offset_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Reader

struct VarTable {
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::string> names;

  Term get(const std::string& name) {
    if (name == "_") return fresh(name);
    const auto it = ids.find(name);
    if (it != ids.end()) return Term::var(name, it->second);
    const auto id = static_cast<std::uint32_t>(names.size());
    ids.emplace(name, id);
    names.push_back(name);
    return Term::var(name, id);
  }

  Term fresh(const std::string& name) {
    const auto id = static_cast<std::uint32_t>(names.size());
    names.push_back(name);
    return Term::var(name, id);
  }
};

struct ReadItem {
  Term term;
  VarTable vars;
  SourcePos pos;
};

class Reader {
 public:
  explicit Reader(std::string_view src) : lexer_(src) { advance(); }

  /// Next top-level item, or nullopt at end of input.
  std::optional<ReadItem> read_item() {
    if (tok_.kind == Tok::eof) return std::nullopt;
    vars_ = VarTable{};
    const SourcePos start = tok_.pos;
    Term t = parse(1200).first;
    if (tok_.kind == Tok::eof) throw ParseError("unterminated clause (missing '.')", tok_.pos);
    if (tok_.kind != Tok::end) throw ParseError("operator expected, found " + describe(tok_), tok_.pos);
    advance();
    return ReadItem{std::move(t), std::move(vars_), start};
  }

 private:
  void advance() {
    tok_ = lexer_.next();
    // Functional notation needs the '(' to follow the name immediately.
    if (tok_.kind == Tok::open && !tok_.layout_before && prev_was_name_) tok_.kind = Tok::open_ct;
    prev_was_name_ = tok_.kind == Tok::name || tok_.kind == Tok::quoted;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::name:
      case Tok::quoted:
      case Tok::var:
      case Tok::number:
        return "'" + t.text + "'";
      case Tok::string: return "string literal";
      case Tok::open:
      case Tok::open_ct: return "'('";
      case Tok::close: return "')'";
      case Tok::comma: return "','";
      case Tok::bar: return "'|'";
      case Tok::open_list: return "'['";
      case Tok::close_list: return "']'";
      case Tok::open_curly: return "'{'";
      case Tok::close_curly: return "'}'";
      case Tok::end: return "end of clause";
      case Tok::eof: return "end of input";
    }
    return "token";
  }

  // Whether the current token can begin a term (used to decide if a prefix
  // operator is applied or stands alone as an atom).
  [[nodiscard]] bool starts_term() const {
    switch (tok_.kind) {
      case Tok::name:
        // An infix-only operator cannot start an operand.
        return !(infix_op(tok_.text) && !prefix_op(tok_.text));
      case Tok::quoted:
      case Tok::var:
      case Tok::number:
      case Tok::string:
      case Tok::open:
      case Tok::open_ct:
      case Tok::open_list:
      case Tok::open_curly:
        return true;
      default:
        return false;
    }
  }

  std::pair<Term, int> parse(int max_prec) {
    auto [left, left_prec] = parse_primary(max_prec);
    for (;;) {
      std::string op;
      if (tok_.kind == Tok::name) {
        op = tok_.text;
      } else if (tok_.kind == Tok::comma) {
        op = ",";
      } else if (tok_.kind == Tok::bar) {
        op = "|";
      } else {
        break;
      }
      const auto def = infix_op(op);
      if (!def) {
        if (tok_.kind == Tok::name && !prefix_op(op)) {
          throw ParseError("unknown operator '" + op + "'", tok_.pos);
        }
        break;
      }
      if (def->priority > max_prec || left_prec > def->left_max()) break;
      advance();
      auto right = parse(def->right_max()).first;
      if (op == "|") op = ";";
      left = Term::compound(op, {left, right});
      left_prec = def->priority;
    }
    return {left, left_prec};
  }

  std::pair<Term, int> parse_primary(int max_prec) {
    const Token t = tok_;
    switch (t.kind) {
      case Tok::number:
        advance();
        return {Term::number(t.value), 0};
      case Tok::var:
        advance();
        return {vars_.get(t.text), 0};
      case Tok::string:
        unsupported("string literal", t.pos);
      case Tok::open_list:
        unsupported("list", t.pos);
      case Tok::open_curly:
        unsupported("curly-brace term", t.pos);
      case Tok::open:
      case Tok::open_ct: {
        advance();
        auto inner = parse(1200).first;
        expect(Tok::close, "')'");
        return {inner, 0};
      }
      case Tok::name:
      case Tok::quoted:
        return parse_name(max_prec);
      case Tok::eof:
        throw ParseError("unterminated clause (missing '.')", t.pos);
      default:
        throw ParseError("unexpected " + describe(t), t.pos);
    }
  }

  std::pair<Term, int> parse_name(int max_prec) {
    const Token t = tok_;
    advance();
    if (tok_.kind == Tok::open_ct) {
      advance();
      std::vector<Term> args;
      args.push_back(parse(999).first);
      while (tok_.kind == Tok::comma) {
        advance();
        args.push_back(parse(999).first);
      }
      expect(Tok::close, "')' or ','");
      return {Term::compound(t.text, std::move(args)), 0};
    }
    if (t.kind == Tok::name && t.text == "-" && tok_.kind == Tok::number && !tok_.layout_before) {
      const Token n = tok_;
      advance();
      return {Term::number(-n.value), 0};
    }
    if (t.kind == Tok::name) {
      if (const auto def = prefix_op(t.text); def && starts_term()) {
        int priority = def->priority;
        int arg_max = def->right_max();
        if (priority > max_prec) {
          priority = 999;
          arg_max = 999;
        }
        auto arg = parse(arg_max).first;
        return {Term::compound(t.text, {arg}), priority};
      }
      if (t.text == "[]" || t.text == "{}") unsupported(t.text == "[]" ? "list" : "curly-brace term", t.pos);
    }
    return {Term::atom(t.text), 0};
  }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) throw ParseError(std::string("expected ") + what + ", found " + describe(tok_), tok_.pos);
    advance();
  }

  Lexer lexer_;
  Token tok_;
  bool prev_was_name_ = false;
  VarTable vars_;
};

// ---------------------------------------------------------------------------
// Goal compilation

constexpr std::array<std::string_view, 9> kUnsupportedDirectives{
    "module", "use_module", "ensure_loaded", "discontiguous", "initialization",
    "multifile", "table", "set_prolog_flag", "include"};

// Library and ISO predicates outside the supported subset.
const std::unordered_set<PredicateIndicator>& unsupported_builtins() {
  static const std::unordered_set<PredicateIndicator> kSet = [] {
    std::unordered_set<PredicateIndicator> s;
    const std::pair<const char*, std::size_t> entries[] = {
        {"findall", 3}, {"findall", 4}, {"bagof", 3}, {"setof", 3}, {"forall", 2}, {"aggregate_all", 3},
        {"call", 1}, {"call", 2}, {"call", 3}, {"call", 4}, {"call", 5}, {"not", 1}, {"once", 1},
        {"ignore", 1}, {"catch", 3}, {"throw", 1}, {"asserta", 1}, {"abolish", 1}, {"halt", 0}, {"halt", 1},
        {"var", 1}, {"nonvar", 1}, {"atom", 1}, {"number", 1}, {"integer", 1}, {"float", 1}, {"atomic", 1},
        {"compound", 1}, {"callable", 1}, {"is_list", 1}, {"ground", 1}, {"functor", 3}, {"arg", 3},
        {"copy_term", 2}, {"between", 3}, {"succ", 2}, {"plus", 3}, {"length", 2}, {"member", 2},
        {"memberchk", 2}, {"append", 3}, {"append", 2}, {"nth0", 3}, {"nth1", 3}, {"last", 2},
        {"reverse", 2}, {"msort", 2}, {"sort", 2}, {"sort", 4}, {"predsort", 3}, {"list_to_set", 2},
        {"sum_list", 2}, {"sumlist", 2}, {"max_list", 2}, {"min_list", 2}, {"exclude", 3}, {"include", 3},
        {"maplist", 2}, {"maplist", 3}, {"maplist", 4}, {"maplist", 5}, {"foldl", 4}, {"foldl", 5},
        {"foldl", 6}, {"atom_codes", 2}, {"atom_chars", 2}, {"char_code", 2}, {"atom_length", 2},
        {"atom_concat", 3}, {"sub_atom", 5}, {"atom_number", 2}, {"atom_string", 2}, {"number_codes", 2},
        {"number_chars", 2}, {"atom_to_term", 3}, {"term_to_atom", 2}, {"string_concat", 3},
        {"string_chars", 2}, {"string_codes", 2}, {"string_to_atom", 2}, {"string_length", 2},
        {"sub_string", 5}, {"split_string", 4}, {"number_string", 2}, {"string", 1}, {"format", 1},
        {"format", 2}, {"format", 3}, {"write", 1}, {"writeln", 1}, {"print", 1}, {"writeq", 1},
        {"write_canonical", 1}, {"nl", 0}, {"tab", 1}, {"read", 1}, {"read_term", 2}, {"consult", 1},
        {"listing", 0}, {"listing", 1}, {"nb_getval", 2}, {"b_getval", 2}, {"nb_setval", 2},
        {"b_setval", 2}, {"get_time", 1}, {"succ_or_zero", 1}, {"tab", 2}, {"dynamic", 1},
        {"discontiguous", 1}, {"compare", 3}, {"keysort", 2}, {"pairs_keys_values", 3},
        {"number_vars", 3}, {"numbervars", 3}, {"clause", 2}, {"current_predicate", 1},
        {"predicate_property", 2}, {"assertion", 1}, {"must_be", 2}, {"date_time_stamp", 2},
        {"get_date", 1}, {"stamp_date_time", 3},
    };
    for (const auto& [name, arity] : entries) s.insert({name, arity});
    return s;
  }();
  return kSet;
}

bool is_builtin_head(const PredicateIndicator& pi) {
  static const std::unordered_set<PredicateIndicator> kSet = {
      {",", 2}, {";", 2}, {"\\+", 1}, {"->", 2}, {"=", 2}, {"is", 2}, {"<", 2}, {">", 2}, {"=<", 2},
      {">=", 2}, {"=:=", 2}, {"=\\=", 2}, {"assert", 1}, {"assertz", 1}, {"retract", 1},
      {"retractall", 1}, {"true", 0}, {"fail", 0}, {"false", 0}, {"!", 0}, {":-", 1}, {":-", 2},
      {"?-", 1}, {"|", 2},
  };
  return kSet.contains(pi);
}

std::optional<CompareOp> compare_op(std::string_view name) {
  if (name == "<") return CompareOp::lt;
  if (name == ">") return CompareOp::gt;
  if (name == "=<") return CompareOp::le;
  if (name == ">=") return CompareOp::ge;
  if (name == "=:=") return CompareOp::eq;
  if (name == "=\\=") return CompareOp::ne;
  return std::nullopt;
}

GoalPtr leaf(GoalKind kind, const Term& t) {
  auto g = std::make_shared<Goal>(Goal{.kind = kind, .term = t});
  return g;
}

GoalPtr compile(const Term& t, const DefinedSet& defined, SourcePos pos) {
  switch (t.kind()) {
    case TermKind::var:
      return leaf(GoalKind::meta_call, t);
    case TermKind::number:
      throw ParseError("goal is not callable: " + t.number().to_string(), pos);
    case TermKind::atom: {
      const auto& n = t.name();
      if (n == "true") return leaf(GoalKind::truth, t);
      if (n == "fail" || n == "false") return leaf(GoalKind::fail, t);
      if (n == "!") return leaf(GoalKind::cut, t);
      break;
    }
    case TermKind::compound:
      break;
  }

  const PredicateIndicator pi = indicator_of(t);
  if (t.is_compound()) {
    const auto& n = t.name();
    if (pi.arity == 2 && (n == "," || n == ";")) {
      if (n == ";" && t.arg(0).is_compound() && t.arg(0).arity() == 2 &&
          (t.arg(0).name() == "->" || t.arg(0).name() == "*->")) {
        unsupported("if-then-else (" + t.arg(0).name() + ")", pos);
      }
      auto g = std::make_shared<Goal>(Goal{.kind = n == "," ? GoalKind::conjunction : GoalKind::disjunction,
                                           .term = t,
                                           .left = compile(t.arg(0), defined, pos),
                                           .right = compile(t.arg(1), defined, pos)});
      return g;
    }
    if (pi.arity == 2 && (n == "->" || n == "*->")) unsupported("if-then (" + n + ")", pos);
    if (pi.arity == 1 && n == "\\+") {
      return std::make_shared<Goal>(
          Goal{.kind = GoalKind::negation, .term = t, .left = compile(t.arg(0), defined, pos)});
    }
    if (pi.arity == 2 && n == "=") return leaf(GoalKind::unify, t);
    if (pi.arity == 2 && n == "is") return leaf(GoalKind::evaluate, t);
    if (pi.arity == 2) {
      if (const auto op = compare_op(n)) {
        return std::make_shared<Goal>(Goal{.kind = GoalKind::compare, .term = t, .op = *op});
      }
    }
    if (pi.arity == 1 && (n == "assert" || n == "assertz")) return leaf(GoalKind::assert_clause, t);
    if (pi.arity == 1 && n == "retract") return leaf(GoalKind::retract, t);
    if (pi.arity == 1 && n == "retractall") return leaf(GoalKind::retractall, t);
    if (pi.arity == 2 && n == ":") unsupported("module-qualified goal", pos);
    if (infix_op(n) && pi.arity == 2 && !defined.contains(pi)) unsupported(pi.to_string(), pos);
  }
  if (unsupported_builtins().contains(pi) && !defined.contains(pi)) unsupported(pi.to_string(), pos);
  return std::make_shared<Goal>(Goal{.kind = GoalKind::call, .term = t, .callee = pi});
}

void collect_dynamic(const Term& spec, std::vector<PredicateIndicator>& out, SourcePos pos) {
  if (spec.is(",", 2)) {
    collect_dynamic(spec.arg(0), out, pos);
    collect_dynamic(spec.arg(1), out, pos);
    return;
  }
  if (spec.is("/", 2) && spec.arg(0).is_atom() && spec.arg(1).is_number()) {
    const auto arity = spec.arg(1).number().to_int64();
    if (arity && *arity >= 0) {
      out.push_back({spec.arg(0).name(), static_cast<std::size_t>(*arity)});
      return;
    }
  }
  throw ParseError("malformed dynamic declaration", pos);
}

std::vector<ReadItem> read_all(std::string_view source) {
  Reader reader(source);
  std::vector<ReadItem> items;
  while (auto item = reader.read_item()) items.push_back(std::move(*item));
  return items;
}

Term head_of(const Term& t) { return t.is(":-", 2) ? t.arg(0) : t; }

bool is_directive(const Term& t) { return t.is(":-", 1) || t.is("?-", 1); }

DefinedSet defined_heads(const std::vector<ReadItem>& items) {
  DefinedSet out;
  for (const auto& item : items) {
    if (is_directive(item.term)) continue;
    const Term head = head_of(item.term);
    if (head.is_callable()) out.insert(indicator_of(head));
  }
  return out;
}

Query make_query(const Term& goal, const VarTable& vars, SourcePos pos, const DefinedSet& defined) {
  return Query{goal, compile(goal, defined, pos), static_cast<std::uint32_t>(vars.names.size()), vars.names, pos};
}

// Adds a clause or directive to `program`.
void load_item(Program& program, const ReadItem& item, const DefinedSet& defined) {
  const Term& t = item.term;
  if (is_directive(t)) {
    const Term& body = t.arg(0);
    if (body.is("dynamic", 1)) {
      std::vector<PredicateIndicator> pis;
      collect_dynamic(body.arg(0), pis, item.pos);
      for (const auto& pi : pis) program.declare_dynamic(pi);
      return;
    }
    if (body.is_callable()) {
      for (auto name : kUnsupportedDirectives) {
        if (body.name() == name) unsupported(std::string(name) + " directive", item.pos);
      }
    }
    program.add_directive(make_query(body, item.vars, item.pos, defined));
    return;
  }
  if (t.is("-->", 2)) unsupported("DCG rule (-->)", item.pos);
  program.add_clause(make_clause(t, static_cast<std::uint32_t>(item.vars.names.size()), item.vars.names,
                                 item.pos, defined));
}

}  // namespace

GoalPtr compile_goal(const Term& body, const DefinedSet& defined, SourcePos pos) {
  return compile(body, defined, pos);
}

ClausePtr make_clause(const Term& term, std::uint32_t var_count, std::vector<std::string> var_names, SourcePos pos,
                      const DefinedSet& defined) {
  const bool rule = term.is(":-", 2);
  const Term head = rule ? term.arg(0) : term;
  const Term body = rule ? term.arg(1) : Term::atom("true");
  if (head.is_var()) throw ParseError("clause head is a variable", pos);
  if (head.is_number()) throw ParseError("clause head is a number", pos);
  const auto pi = indicator_of(head);
  if (is_builtin_head(pi)) throw ParseError("cannot redefine built-in " + pi.to_string(), pos);
  auto clause = std::make_shared<Clause>(Clause{
      .head = head,
      .body = body,
      .goal = compile(body, defined, pos),
      .var_count = var_count,
      .var_names = std::move(var_names),
      .pos = pos,
  });
  return clause;
}

Program parse_program(std::string_view source) {
  const auto items = read_all(source);
  const auto defined = defined_heads(items);
  Program program;
  for (const auto& item : items) load_item(program, item, defined);
  return program;
}

QueryFile parse_query(std::string_view source) {
  auto items = read_all(source);
  std::optional<std::size_t> goal_index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].term.is("?-", 1)) {
      if (goal_index) throw ParseError("multiple goals found in query", items[i].pos);
      goal_index = i;
    }
  }
  bool headless = false;
  if (!goal_index && !items.empty()) {
    const Term& last = items.back().term;
    if (last.is_callable() && !last.is(":-", 2) && !last.is(":-", 1) && !last.is("-->", 2)) {
      goal_index = items.size() - 1;
      headless = true;
    }
  }
  if (!goal_index) throw ParseError("no goal found in query", items.empty() ? SourcePos{1, 1} : items.back().pos);

  DefinedSet defined;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i == *goal_index || is_directive(items[i].term)) continue;
    const Term head = head_of(items[i].term);
    if (head.is_callable()) defined.insert(indicator_of(head));
  }
  QueryFile out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i == *goal_index) continue;
    load_item(out.prelude, items[i], defined);
  }
  const auto& g = items[*goal_index];
  out.goal = make_query(headless ? g.term : g.term.arg(0), g.vars, g.pos, defined);
  return out;
}

Query parse_goal(std::string_view text) {
  std::string src(text);
  // Accept a bare goal without the terminating '.'.
  auto last = src.find_last_not_of(" \t\r\n");
  if (last == std::string::npos) throw ParseError("empty goal", {1, 1});
  if (src[last] != '.') src += "\n.";
  auto items = read_all(src);
  if (items.size() != 1) throw ParseError("expected exactly one goal", items.empty() ? SourcePos{1, 1} : items[1].pos);
  const auto& item = items.front();
  const Term goal = item.term.is("?-", 1) ? item.term.arg(0) : item.term;
  return make_query(goal, item.vars, item.pos, {});
}

}  // namespace ccx::engine
