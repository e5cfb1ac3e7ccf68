#pragma once

#include <string>

#include "usp/expr.hpp"
#include "usp/sequent.hpp"

namespace usp {

// ASCII concrete syntax with minimal parentheses; re-parses to an equal AST.
std::string print(const Expr& e);

// "a, b ==> c"
std::string print(const Sequent& s);

}  // namespace usp
