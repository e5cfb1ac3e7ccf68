#pragma once

// Readable gtest failure output for AST values.

#include <ostream>

#include "usp/printer.hpp"
#include "usp/sequent.hpp"

namespace usp {

inline void PrintTo(const Expr& e, std::ostream* os) { *os << (e.valid() ? print(e) : "<null>"); }
inline void PrintTo(const Sequent& s, std::ostream* os) { *os << print(s); }

}  // namespace usp
