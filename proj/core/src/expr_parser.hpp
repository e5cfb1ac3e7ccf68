#pragma once

#include <string>
#include <vector>

#include "lexer.hpp"
#include "usp/expr.hpp"
#include "usp/parser.hpp"
#include "usp/tactic.hpp"

namespace usp::detail {

// Recursive-descent parser over a token stream; shared by the expression, tactic,
// and archive front ends.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = pos_ + k;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool at_ident(std::string_view id, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == id;
  }
  bool at_eof() const { return peek().kind == Tok::Eof; }
  bool accept(std::string_view p) {
    if (!at_punct(p)) return false;
    next();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "' but found '" + describe(peek()) + "'");
  }
  std::string expect_ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier but found '" + describe(peek()) + "'");
    return next().text;
  }
  std::string expect_string() {
    if (peek().kind != Tok::String) fail("expected string literal but found '" + describe(peek()) + "'");
    return next().text;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }

  std::size_t mark() const { return pos_; }
  void reset(std::size_t m) { pos_ = m; }

  static std::string describe(const Token& t) { return t.kind == Tok::Eof ? "end of input" : t.text; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

class ExprParser {
 public:
  ExprParser(TokenCursor& cursor, const SymbolTable& symbols) : in_(cursor), symbols_(symbols) {}

  Expr formula();
  Expr term();
  Expr program();
  Expr expr(Category c);

  // Variable from an identifier: trailing _<digits> becomes the index.
  static Variable variable_from(const std::string& ident);

 private:
  Expr equiv();
  Expr implication();
  Expr disjunction();
  Expr conjunction();
  Expr unary_formula();
  Expr comparison();
  Expr sum();
  Expr product();
  Expr unary_term();
  Expr power_term();
  Expr primary_term();
  std::vector<Expr> arguments(bool& wild);
  Expr choice();
  Expr sequence();
  Expr atomic_program();
  Expr ode_body();
  bool starts_program() const;

  Symbol resolve(const std::string& name, SymbolKind kind, unsigned arity, bool wild) const;

  TokenCursor& in_;
  const SymbolTable& symbols_;
};

// Tactic from a token slice that ends with an Eof token (keeps source positions).
TacticPtr parse_tactic_tokens(std::vector<Token> tokens);

}  // namespace usp::detail
