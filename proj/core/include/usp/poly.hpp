#pragma once

#include <map>
#include <string>
#include <vector>

#include "usp/expr.hpp"
#include "usp/rational.hpp"

namespace usp {

// Sparse monomial: atom index -> positive exponent.
using Monomial = std::map<unsigned, unsigned>;

// Multivariate polynomial with exact rational coefficients over indexed atoms.
class Poly {
 public:
  Poly() = default;
  static Poly constant(const Rational& c);
  static Poly atom(unsigned index);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  unsigned degree() const;
  bool is_linear() const { return degree() <= 1; }
  std::vector<unsigned> atoms() const;
  // Coefficient of atom v when the polynomial is a*v + rest with rest free of v; false otherwise.
  bool linear_in(unsigned v, Rational& a, Poly& rest) const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly scaled(const Rational& c) const;
  Poly pow(unsigned n) const;
  // Replaces atom v by q.
  Poly substitute(unsigned v, const Poly& q) const;
  Rational evaluate(const std::map<unsigned, Rational>& values) const;

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Poly& a, const Poly& b) { return a.terms_ < b.terms_; }
  std::string str() const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

// Interns the terms treated as real-valued unknowns (variables and opaque terms).
class AtomTable {
 public:
  unsigned intern(const Expr& term);
  const Expr& term(unsigned i) const { return terms_[i]; }
  std::size_t size() const { return terms_.size(); }
  // True when atom i is a plain variable (not an uninterpreted application or differential).
  bool is_variable(unsigned i) const { return terms_[i].op() == Op::Var; }
  unsigned fresh();  // anonymous atom (used for linearized monomials)

 private:
  std::vector<Expr> terms_;
  std::map<Expr, unsigned> index_;
};

}  // namespace usp
