#pragma once

#include <string>
#include <vector>

#include "usp/expr.hpp"

namespace usp {

// Gamma ==> Delta, read as (conjunction of ante) -> (disjunction of succ).
struct Sequent {
  std::vector<Expr> ante;
  std::vector<Expr> succ;

  Sequent() = default;
  Sequent(std::vector<Expr> a, std::vector<Expr> s) : ante(std::move(a)), succ(std::move(s)) {}

  std::string str() const;
  friend bool operator==(const Sequent& a, const Sequent& b) { return a.ante == b.ante && a.succ == b.succ; }
  friend bool operator!=(const Sequent& a, const Sequent& b) { return !(a == b); }

  // The formula reading used for arithmetic and semantic checks.
  Expr as_formula() const;
};

enum class Side { Ante, Succ };

// Addresses one top-level formula of a sequent.
struct Position {
  Side side = Side::Succ;
  std::size_t index = 0;
  friend bool operator==(const Position&, const Position&) = default;
};

inline const std::vector<Expr>& formulas(const Sequent& s, Side side) { return side == Side::Ante ? s.ante : s.succ; }
inline std::vector<Expr>& formulas(Sequent& s, Side side) { return side == Side::Ante ? s.ante : s.succ; }

}  // namespace usp
