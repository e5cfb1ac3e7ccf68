#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "usp/expr.hpp"
#include "usp/sequent.hpp"

namespace usp {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Declared uninterpreted symbols, consulted to disambiguate f(x) (term) from p(x) (formula).
using SymbolTable = std::map<std::string, Symbol>;

Expr parse_term(std::string_view text, const SymbolTable& symbols = {});
Expr parse_formula(std::string_view text, const SymbolTable& symbols = {});
Expr parse_program(std::string_view text, const SymbolTable& symbols = {});
Expr parse_expr(std::string_view text, Category category, const SymbolTable& symbols = {});
Sequent parse_sequent(std::string_view text, const SymbolTable& symbols = {});

}  // namespace usp
