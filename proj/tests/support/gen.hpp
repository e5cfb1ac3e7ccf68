#pragma once

// Random expressions for property tests. Deterministic per seed.

#include <random>
#include <vector>

#include "usp/expr.hpp"
#include "usp/sequent.hpp"

namespace usp::testing {

struct GenConfig {
  std::vector<Variable> vars{Variable("x"), Variable("y"), Variable("z")};
  bool symbols = true;      // uninterpreted f, g, p, q, a, b
  bool odes = true;
  bool quantifiers = true;
  bool division = true;
  int depth = 3;
};

class Gen {
 public:
  explicit Gen(std::uint64_t seed, GenConfig cfg = {}) : rng_(seed), cfg_(std::move(cfg)) {}

  Expr term(int depth);
  Expr formula(int depth);
  Expr program(int depth);
  Expr term() { return term(cfg_.depth); }
  Expr formula() { return formula(cfg_.depth); }
  Expr program() { return program(cfg_.depth); }

  // Only assignments, tests, choice, compose and guarded loops; no symbols or ODEs.
  Expr discrete_program(int depth);
  // Quantifier-free, modality-free arithmetic.
  Expr arith_formula(int depth);
  Expr polynomial(int depth);
  Expr linear_term();

  Variable variable();
  Rational small_rational();  // in [-2, 2], denominator <= 4
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }
  const GenConfig& config() const { return cfg_; }

 private:
  Expr number();
  CmpOp comparison();

  std::mt19937_64 rng_;
  GenConfig cfg_;
};

}  // namespace usp::testing
