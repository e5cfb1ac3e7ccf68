#pragma once

// Normal forms shared by the arithmetic deciders.

#include <map>
#include <vector>

#include "usp/arith.hpp"
#include "usp/poly.hpp"

namespace usp::detail {

struct TooLarge {};

// p rel 0
enum class Rel { Eq, Ne, Gt, Ge };

struct Constraint {
  Poly p;
  Rel rel = Rel::Ge;
};

// Either an arithmetic constraint or an opaque propositional literal.
struct Lit {
  bool opaque = false;
  Constraint c;
  Expr atom;
  bool positive = true;
};

using Conj = std::vector<Lit>;
using Dnf = std::vector<Conj>;

class Normalizer {
 public:
  // DNF of (ante AND NOT succ); the sequent is valid iff every conjunct is unsatisfiable.
  Dnf sequent(const Sequent& s);
  Dnf formula(const Expr& f, bool positive);

  AtomTable atoms;
  bool opaque_terms = false;
  bool opaque_props = false;

 private:
  Dnf atom(const Expr& f, bool positive);
  static Dnf simplify(Dnf d);
};

bool is_trivial(const Constraint& c, bool& value);
std::vector<Constraint> constraints_of(const Conj& c);
// Requires linear constraints. Writes a satisfying point over atom indices when asked.
bool linear_satisfiable(const std::vector<Constraint>& cs, std::map<unsigned, Rational>* witness);
bool heuristic_unsat(std::vector<Constraint> cs, AtomTable& atoms);
Assignment assignment_of(const AtomTable& atoms, const std::map<unsigned, Rational>& w);

}  // namespace usp::detail
