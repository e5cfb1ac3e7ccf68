#include "gen.hpp"

namespace usp::testing {

Variable Gen::variable() { return cfg_.vars[uniform(0, static_cast<int>(cfg_.vars.size()) - 1)]; }

Rational Gen::small_rational() {
  int q = uniform(1, 4);
  int p = uniform(-2 * q, 2 * q);
  return Rational(p, q);
}

// Printable literals: finite decimals, negatives as the parser produces them.
Expr Gen::number() {
  static const std::pair<int, int> pool[] = {{0, 1}, {1, 1}, {2, 1},  {3, 1},  {1, 2}, {1, 4},
                                              {3, 2}, {10, 1}, {-1, 1}, {-2, 1}, {-1, 2}};
  auto [p, q] = pool[uniform(0, 10)];
  return mk::num(Rational(p, q));
}

CmpOp Gen::comparison() {
  static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Ge, CmpOp::Gt, CmpOp::Le, CmpOp::Lt};
  return ops[uniform(0, 5)];
}

Expr Gen::term(int depth) {
  if (depth <= 0 || coin(0.25)) {
    int k = uniform(0, cfg_.symbols ? 3 : 2);
    if (k == 3) return mk::func(mk::function_symbol("c", 0), {});
    if (k == 2) return number();
    return mk::var(variable());
  }
  switch (uniform(0, cfg_.symbols ? 7 : 6)) {
    case 0: return mk::plus(term(depth - 1), term(depth - 1));
    case 1: return mk::minus(term(depth - 1), term(depth - 1));
    case 2: return mk::times(term(depth - 1), term(depth - 1));
    case 3:
      if (cfg_.division) return mk::divide(term(depth - 1), term(depth - 1));
      return mk::plus(term(depth - 1), number());
    case 4: return mk::power(term(depth - 1), mk::num(uniform(0, 3)));
    case 5: return mk::neg(term(depth - 1));
    case 6: return mk::var(variable());
    default: return mk::func(mk::function_symbol("f", 1), {term(depth - 1)});
  }
}

Expr Gen::formula(int depth) {
  if (depth <= 0 || coin(0.2)) {
    int k = uniform(0, cfg_.symbols ? 4 : 2);
    if (k == 0) return coin(0.5) ? mk::tru() : mk::fls();
    if (k == 3) return mk::pred(mk::predicate_symbol("p", 1), {term(1)});
    if (k == 4) return mk::pred(mk::wild_predicate("q"), {});
    return mk::cmp(comparison(), term(1), term(1));
  }
  switch (uniform(0, cfg_.quantifiers ? 9 : 7)) {
    case 0: return mk::lnot(formula(depth - 1));
    case 1: return mk::land(formula(depth - 1), formula(depth - 1));
    case 2: return mk::lor(formula(depth - 1), formula(depth - 1));
    case 3: return mk::imply(formula(depth - 1), formula(depth - 1));
    case 4: return mk::equiv(formula(depth - 1), formula(depth - 1));
    case 5: return mk::box(program(depth - 1), formula(depth - 1));
    case 6: return mk::diamond(program(depth - 1), formula(depth - 1));
    case 7: return mk::cmp(comparison(), term(depth - 1), term(depth - 1));
    case 8: return mk::forall(variable(), formula(depth - 1));
    default: return mk::exists(variable(), formula(depth - 1));
  }
}

Expr Gen::program(int depth) {
  if (depth <= 0 || coin(0.25)) {
    int k = uniform(0, 2 + (cfg_.symbols ? 1 : 0) + (cfg_.odes ? 1 : 0));
    if (k == 0) return mk::assign(variable(), term(1));
    if (k == 1) return mk::test(formula(1));
    if (k == 2) return mk::assign(variable(), term(1));
    if (k == 3 && cfg_.symbols) return mk::prog(mk::program_symbol("a"));
    Variable x = variable();
    // ODE right-hand sides must not mention differentials; terms never do.
    if (coin(0.5))
      return mk::ode({x}, {term(1)}, coin(0.5) ? mk::tru() : mk::cmp(CmpOp::Ge, mk::var(x), number()));
    Variable y = variable();
    if (y == x) return mk::ode({x}, {term(1)}, mk::tru());
    return mk::ode({x, y}, {term(1), term(1)}, mk::tru());
  }
  switch (uniform(0, 3)) {
    case 0: return mk::choice(program(depth - 1), program(depth - 1));
    case 1: return mk::compose(program(depth - 1), program(depth - 1));
    case 2: return mk::loop(program(depth - 1));
    default: return mk::test(formula(depth - 1));
  }
}

Expr Gen::polynomial(int depth) {
  if (depth <= 0 || coin(0.3)) return coin(0.5) ? mk::var(variable()) : mk::num(uniform(-2, 2));
  switch (uniform(0, 3)) {
    case 0: return mk::plus(polynomial(depth - 1), polynomial(depth - 1));
    case 1: return mk::minus(polynomial(depth - 1), polynomial(depth - 1));
    case 2: return mk::times(polynomial(depth - 1), polynomial(depth - 1));
    default: return mk::power(polynomial(depth - 1), mk::num(2));
  }
}

Expr Gen::linear_term() {
  Expr t = mk::num(uniform(-3, 3));
  for (const auto& x : cfg_.vars) {
    int c = uniform(-2, 2);
    if (c == 0) continue;
    t = mk::plus(t, mk::times(mk::num(c), mk::var(x)));
  }
  return t;
}

Expr Gen::arith_formula(int depth) {
  if (depth <= 0 || coin(0.3)) return mk::cmp(comparison(), polynomial(2), polynomial(1));
  switch (uniform(0, 3)) {
    case 0: return mk::lnot(arith_formula(depth - 1));
    case 1: return mk::land(arith_formula(depth - 1), arith_formula(depth - 1));
    case 2: return mk::lor(arith_formula(depth - 1), arith_formula(depth - 1));
    default: return mk::imply(arith_formula(depth - 1), arith_formula(depth - 1));
  }
}

Expr Gen::discrete_program(int depth) {
  if (depth <= 0 || coin(0.3)) {
    if (coin(0.7)) {
      Variable x = variable();
      Expr rhs = coin(0.5) ? mk::plus(mk::var(variable()), mk::num(uniform(-1, 1)))
                           : mk::times(mk::num(uniform(-1, 2)), mk::var(variable()));
      if (cfg_.division && coin(0.1)) rhs = mk::divide(mk::var(variable()), mk::var(variable()));
      return mk::assign(x, rhs);
    }
    return mk::test(mk::cmp(comparison(), mk::var(variable()), mk::num(uniform(-1, 1))));
  }
  switch (uniform(0, 3)) {
    case 0: return mk::choice(discrete_program(depth - 1), discrete_program(depth - 1));
    case 1:
    case 2: return mk::compose(discrete_program(depth - 1), discrete_program(depth - 1));
    default: {
      // Saturating loop: a bounded counter step so the reachable set stays finite.
      Variable x = variable();
      Expr step = mk::compose(mk::test(mk::cmp(CmpOp::Lt, mk::var(x), mk::num(2))),
                              mk::assign(x, mk::plus(mk::var(x), mk::num(1))));
      return mk::loop(coin(0.5) ? step : mk::choice(step, mk::assign(variable(), mk::num(0))));
    }
  }
}

}  // namespace usp::testing
