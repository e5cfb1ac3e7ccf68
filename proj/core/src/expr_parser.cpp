#include "expr_parser.hpp"

#include <cctype>

namespace usp::detail {

namespace {

std::optional<CmpOp> cmp_of(const Token& t) {
  if (t.kind != Tok::Punct) return std::nullopt;
  if (t.text == "=") return CmpOp::Eq;
  if (t.text == "!=") return CmpOp::Ne;
  if (t.text == ">=") return CmpOp::Ge;
  if (t.text == ">") return CmpOp::Gt;
  if (t.text == "<=") return CmpOp::Le;
  if (t.text == "<") return CmpOp::Lt;
  return std::nullopt;
}

bool reserved(const std::string& s) { return s == "true" || s == "false" || s == "if" || s == "else"; }

}  // namespace

Variable ExprParser::variable_from(const std::string& ident) {
  std::size_t us = ident.rfind('_');
  if (us != std::string::npos && us > 0 && us + 1 < ident.size()) {
    bool digits = true;
    for (std::size_t i = us + 1; i < ident.size(); ++i)
      digits = digits && std::isdigit(static_cast<unsigned char>(ident[i]));
    if (digits && ident.size() - us - 1 < 9)
      return Variable(ident.substr(0, us), static_cast<unsigned>(std::stoul(ident.substr(us + 1))));
  }
  return Variable(ident);
}

Symbol ExprParser::resolve(const std::string& name, SymbolKind kind, unsigned arity, bool wild) const {
  if (wild) return Symbol{name, kind, 0, Space::Wild};
  return Symbol{name, kind, arity, Space::Applied};
}

Expr ExprParser::expr(Category c) {
  switch (c) {
    case Category::Term: return term();
    case Category::Formula: return formula();
    case Category::Program: return program();
  }
  return {};
}

Expr ExprParser::formula() { return equiv(); }

Expr ExprParser::equiv() {
  Expr lhs = implication();
  if (in_.accept("<->")) return mk::equiv(lhs, equiv());
  return lhs;
}

Expr ExprParser::implication() {
  Expr lhs = disjunction();
  if (in_.accept("->")) return mk::imply(lhs, implication());
  return lhs;
}

Expr ExprParser::disjunction() {
  Expr lhs = conjunction();
  if (in_.accept("|")) return mk::lor(lhs, disjunction());
  return lhs;
}

Expr ExprParser::conjunction() {
  Expr lhs = unary_formula();
  if (in_.accept("&")) return mk::land(lhs, conjunction());
  return lhs;
}

Expr ExprParser::unary_formula() {
  if (in_.accept("!")) return mk::lnot(unary_formula());
  if (in_.at_punct("\\forall") || in_.at_punct("\\exists")) {
    bool all = in_.next().text == "\\forall";
    Variable x = variable_from(in_.expect_ident());
    Expr body = unary_formula();
    return all ? mk::forall(x, body) : mk::exists(x, body);
  }
  if (in_.accept("[")) {
    Expr p = program();
    in_.expect("]");
    return mk::box(p, unary_formula());
  }
  if (in_.accept("<")) {
    Expr p = program();
    in_.expect(">");
    return mk::diamond(p, unary_formula());
  }
  if (in_.at_ident("true")) {
    in_.next();
    return mk::tru();
  }
  if (in_.at_ident("false")) {
    in_.next();
    return mk::fls();
  }
  if (in_.at_punct("(")) {
    std::size_t m = in_.mark();
    try {
      return comparison();
    } catch (const ParseError&) {
      in_.reset(m);
    }
    in_.expect("(");
    Expr f = formula();
    in_.expect(")");
    return f;
  }
  return comparison();
}

Expr ExprParser::comparison() {
  Expr lhs = term();
  if (auto op = cmp_of(in_.peek())) {
    in_.next();
    return mk::cmp(*op, lhs, term());
  }
  if (lhs.op() == Op::Func) {
    const Symbol& f = lhs.symbol();
    auto it = symbols_.find(f.name);
    if (it != symbols_.end() && it->second.kind == SymbolKind::Function)
      in_.fail("expected comparison after term " + f.name);
    Symbol p = f;
    p.kind = SymbolKind::Predicate;
    return mk::pred(p, std::vector<Expr>(lhs.children().begin(), lhs.children().end()));
  }
  in_.fail("expected comparison operator but found '" + TokenCursor::describe(in_.peek()) + "'");
}

Expr ExprParser::term() { return sum(); }

Expr ExprParser::sum() {
  Expr lhs = product();
  while (in_.at_punct("+") || in_.at_punct("-")) {
    bool add = in_.next().text == "+";
    Expr rhs = product();
    lhs = add ? mk::plus(lhs, rhs) : mk::minus(lhs, rhs);
  }
  return lhs;
}

Expr ExprParser::product() {
  Expr lhs = unary_term();
  while (in_.at_punct("*") || in_.at_punct("/")) {
    bool mul = in_.next().text == "*";
    Expr rhs = unary_term();
    lhs = mul ? mk::times(lhs, rhs) : mk::divide(lhs, rhs);
  }
  return lhs;
}

Expr ExprParser::unary_term() {
  if (in_.at_punct("-")) {
    // A minus directly on a literal is a negative literal unless the literal is a power base.
    if (in_.peek(1).kind == Tok::Number && !(in_.peek(2).kind == Tok::Punct && in_.peek(2).text == "^")) {
      in_.next();
      auto v = parse_decimal(in_.next().text);
      return mk::num(-*v);
    }
    in_.next();
    return mk::neg(unary_term());
  }
  return power_term();
}

Expr ExprParser::power_term() {
  Expr base = primary_term();
  if (in_.accept("^")) {
    bool paren = in_.accept("(");
    if (in_.peek().kind != Tok::Number) in_.fail("exponent must be a natural number literal");
    auto v = parse_decimal(in_.next().text);
    if (paren) in_.expect(")");
    if (!v || !is_integer(*v)) in_.fail("exponent must be a natural number literal");
    return mk::power(base, mk::num(*v));
  }
  return base;
}

std::vector<Expr> ExprParser::arguments(bool& wild) {
  in_.expect("(");
  std::vector<Expr> args;
  wild = false;
  if (in_.accept("||")) {
    in_.expect(")");
    wild = true;
    return args;
  }
  if (in_.accept(")")) return args;
  args.push_back(term());
  while (in_.accept(",")) args.push_back(term());
  in_.expect(")");
  return args;
}

Expr ExprParser::primary_term() {
  const Token& t = in_.peek();
  if (t.kind == Tok::Number) {
    auto v = parse_decimal(in_.next().text);
    if (!v) in_.fail("malformed number");
    return mk::num(*v);
  }
  if (t.kind == Tok::Punct && t.text == ".") {
    in_.next();
    return mk::dot(0);
  }
  if (t.kind == Tok::Punct && t.text.rfind("._", 0) == 0) {
    unsigned idx = static_cast<unsigned>(std::stoul(in_.next().text.substr(2)));
    return mk::dot(idx);
  }
  if (t.kind == Tok::Ident) {
    if (reserved(t.text)) in_.fail("unexpected keyword " + t.text);
    std::string name = in_.next().text;
    if (in_.at_punct("(")) {
      bool wild = false;
      auto args = arguments(wild);
      Symbol f = resolve(name, SymbolKind::Function, static_cast<unsigned>(args.size()), wild);
      return mk::func(f, std::move(args));
    }
    Variable x = variable_from(name);
    if (in_.accept("'")) x = x.prime();
    return mk::var(x);
  }
  if (in_.accept("(")) {
    Expr inner = term();
    in_.expect(")");
    if (in_.accept("'")) return mk::differential(inner);
    return inner;
  }
  in_.fail("expected term but found '" + TokenCursor::describe(t) + "'");
}

Expr ExprParser::program() { return choice(); }

Expr ExprParser::choice() {
  Expr lhs = sequence();
  if (in_.accept("++")) return mk::choice(lhs, choice());
  return lhs;
}

bool ExprParser::starts_program() const {
  const Token& t = in_.peek();
  if (t.kind == Tok::Ident) return t.text != "else";
  return t.kind == Tok::Punct && (t.text == "?" || t.text == "{");
}

Expr ExprParser::sequence() {
  Expr first = atomic_program();
  if (starts_program()) return mk::compose(first, sequence());
  return first;
}

Expr ExprParser::ode_body() {
  std::vector<Variable> vars;
  std::vector<Expr> rhs;
  do {
    Variable x = variable_from(in_.expect_ident());
    in_.expect("'");
    in_.expect("=");
    vars.push_back(x);
    rhs.push_back(term());
  } while (in_.accept(","));
  Expr domain = mk::tru();
  if (in_.accept("&")) domain = formula();
  in_.expect("}");
  try {
    return mk::ode(std::move(vars), std::move(rhs), domain);
  } catch (const ExprError& e) {
    in_.fail(e.what());
  }
}

Expr ExprParser::atomic_program() {
  if (in_.accept("?")) {
    Expr cond = formula();
    in_.expect(";");
    return mk::test(cond);
  }
  if (in_.accept("{")) {
    Expr p;
    if (in_.peek().kind == Tok::Ident && in_.at_punct("'", 1)) {
      p = ode_body();
    } else {
      p = program();
      in_.expect("}");
    }
    if (in_.accept("*")) return mk::loop(p);
    return p;
  }
  if (in_.at_ident("if")) {
    in_.next();
    in_.expect("(");
    Expr cond = formula();
    in_.expect(")");
    Expr then_branch = atomic_program();
    Expr else_branch = mk::test(mk::tru());
    if (in_.at_ident("else")) {
      in_.next();
      else_branch = atomic_program();
    }
    return mk::choice(mk::compose(mk::test(cond), then_branch), mk::compose(mk::test(mk::lnot(cond)), else_branch));
  }
  if (in_.peek().kind == Tok::Ident) {
    std::string name = in_.next().text;
    if (in_.accept(":=")) {
      if (in_.at_punct("*")) in_.fail("nondeterministic assignment is not supported");
      Expr value = term();
      in_.expect(";");
      return mk::assign(variable_from(name), value);
    }
    if (in_.accept(";")) return mk::prog(mk::program_symbol(name));
    in_.fail("expected ':=' or ';' after " + name);
  }
  in_.fail("expected program but found '" + TokenCursor::describe(in_.peek()) + "'");
}

}  // namespace usp::detail

namespace usp {

namespace {

template <class F>
auto parse_all(std::string_view text, F&& f) {
  detail::TokenCursor cursor(detail::tokenize(text));
  auto result = f(cursor);
  if (!cursor.at_eof()) cursor.fail("unexpected trailing input '" + detail::TokenCursor::describe(cursor.peek()) + "'");
  return result;
}

}  // namespace

Expr parse_expr(std::string_view text, Category category, const SymbolTable& symbols) {
  return parse_all(text, [&](detail::TokenCursor& c) {
    detail::ExprParser p(c, symbols);
    try {
      return p.expr(category);
    } catch (const ExprError& e) {
      c.fail(e.what());
    }
  });
}

Expr parse_term(std::string_view text, const SymbolTable& symbols) {
  return parse_expr(text, Category::Term, symbols);
}
Expr parse_formula(std::string_view text, const SymbolTable& symbols) {
  return parse_expr(text, Category::Formula, symbols);
}
Expr parse_program(std::string_view text, const SymbolTable& symbols) {
  return parse_expr(text, Category::Program, symbols);
}

Sequent parse_sequent(std::string_view text, const SymbolTable& symbols) {
  return parse_all(text, [&](detail::TokenCursor& c) {
    detail::ExprParser p(c, symbols);
    Sequent s;
    if (!c.at_punct("==>")) {
      s.ante.push_back(p.formula());
      while (c.accept(",")) s.ante.push_back(p.formula());
    }
    c.expect("==>");
    if (!c.at_eof()) {
      s.succ.push_back(p.formula());
      while (c.accept(",")) s.succ.push_back(p.formula());
    }
    return s;
  });
}

}  // namespace usp
