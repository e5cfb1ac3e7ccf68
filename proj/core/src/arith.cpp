#include "usp/arith.hpp"

#include <algorithm>
#include <set>

#include "usp/poly.hpp"
#include "usp/printer.hpp"
#include "usp/static_semantics.hpp"
#include "arith_internal.hpp"
#include "verdict_factory.hpp"

namespace usp {

using detail::VerdictFactory;

namespace detail {

namespace {

constexpr std::size_t kMaxDisjuncts = 20000;
constexpr std::size_t kMaxConstraints = 4000;
constexpr std::size_t kMaxSplits = 12;

struct NotArithmetic {};

std::optional<Rational> eval_term(const Expr& t, const Assignment& vals) {
  switch (t.op()) {
    case Op::Num: return t.num();
    case Op::Var: {
      auto it = vals.find(t.var());
      return it == vals.end() ? Rational(0) : it->second;
    }
    case Op::Neg: {
      auto a = eval_term(t.child(0), vals);
      if (!a) return std::nullopt;
      return -*a;
    }
    case Op::Power: {
      auto a = eval_term(t.child(0), vals);
      if (!a) return std::nullopt;
      return usp::pow(*a, static_cast<unsigned>(numerator_of(t.child(1).num())));
    }
    case Op::Plus:
    case Op::Minus:
    case Op::Times:
    case Op::Divide: {
      auto a = eval_term(t.child(0), vals);
      auto b = eval_term(t.child(1), vals);
      if (!a || !b) return std::nullopt;
      switch (t.op()) {
        case Op::Plus: return *a + *b;
        case Op::Minus: return *a - *b;
        case Op::Times: return *a * *b;
        default:
          if (*b == 0) return std::nullopt;
          return *a / *b;
      }
    }
    default: throw NotArithmetic{};
  }
}

bool compare(CmpOp op, const Rational& a, const Rational& b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Lt: return a < b;
  }
  return false;
}

bool eval_formula(const Expr& f, const Assignment& vals) {
  switch (f.op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Cmp: {
      auto a = eval_term(f.child(0), vals);
      auto b = eval_term(f.child(1), vals);
      if (!a || !b) return false;
      return compare(f.cmp(), *a, *b);
    }
    case Op::Not: return !eval_formula(f.child(0), vals);
    case Op::And: return eval_formula(f.child(0), vals) && eval_formula(f.child(1), vals);
    case Op::Or: return eval_formula(f.child(0), vals) || eval_formula(f.child(1), vals);
    case Op::Imply: return !eval_formula(f.child(0), vals) || eval_formula(f.child(1), vals);
    case Op::Equiv: return eval_formula(f.child(0), vals) == eval_formula(f.child(1), vals);
    default: throw NotArithmetic{};
  }
}

bool holds(Rel rel, const Rational& v) {
  switch (rel) {
    case Rel::Eq: return v == 0;
    case Rel::Ne: return v != 0;
    case Rel::Gt: return v > 0;
    case Rel::Ge: return v >= 0;
  }
  return false;
}

struct RatFn {
  Poly num;
  Poly den;
};

RatFn normalized(Poly num, Poly den) {
  if (den.is_constant()) return {num.scaled(1 / den.constant_term()), Poly::constant(1)};
  return {std::move(num), std::move(den)};
}

Dnf product(const Dnf& a, const Dnf& b) {
  if (a.size() * b.size() > kMaxDisjuncts) throw TooLarge{};
  Dnf r;
  r.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) {
      Conj c = x;
      c.insert(c.end(), y.begin(), y.end());
      r.push_back(std::move(c));
    }
  }
  return r;
}

Dnf both(Dnf a, const Dnf& b) {
  if (a.size() + b.size() > kMaxDisjuncts) throw TooLarge{};
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// ---- linear constraints and Fourier-Motzkin ----

struct Lin {
  std::map<unsigned, Rational> a;
  Rational c;
  Rel rel = Rel::Ge;  // Eq, Gt, Ge
};

Lin to_lin(const Poly& p, Rel rel) {
  Lin l;
  l.rel = rel;
  for (const auto& [m, k] : p.terms()) {
    if (m.empty()) {
      l.c = k;
    } else {
      l.a[m.begin()->first] = k;
    }
  }
  return l;
}

// x <- x + f*y
void add_scaled(Lin& x, const Lin& y, const Rational& f) {
  for (const auto& [v, k] : y.a) {
    Rational n = x.a[v] + f * k;
    if (n == 0) {
      x.a.erase(v);
    } else {
      x.a[v] = n;
    }
  }
  x.c += f * y.c;
}

Lin canonical(Lin l) {
  if (l.a.empty()) return l;
  Rational s = abs(l.a.begin()->second);
  for (auto& [v, k] : l.a) k /= s;
  l.c /= s;
  return l;
}

bool lin_less(const Lin& x, const Lin& y) {
  if (x.rel != y.rel) return x.rel < y.rel;
  if (x.c != y.c) return x.c < y.c;
  return x.a < y.a;
}

struct Step {
  unsigned var;
  bool equation;
  std::vector<Lin> cons;
};

Rational pick(const std::optional<Rational>& lo, bool lo_strict, const std::optional<Rational>& hi, bool hi_strict) {
  auto ok = [&](const Rational& x) {
    if (lo && (x < *lo || (lo_strict && x == *lo))) return false;
    if (hi && (x > *hi || (hi_strict && x == *hi))) return false;
    return true;
  };
  if (ok(0)) return 0;
  std::vector<Rational> cands;
  auto floor_of = [](const Rational& q) {
    Integer n = numerator_of(q);
    Integer d = denominator_of(q);
    Integer f = n / d;
    if (n < 0 && f * d != n) f -= 1;
    return Rational(f);
  };
  if (lo) {
    cands.push_back(floor_of(*lo) + 1);
    cands.push_back(floor_of(*lo));
  }
  if (hi) {
    cands.push_back(floor_of(*hi));
    cands.push_back(floor_of(*hi) - 1);
  }
  std::optional<Rational> best;
  for (const auto& c : cands)
    if (ok(c) && (!best || abs(c) < abs(*best))) best = c;
  if (best) return *best;
  if (lo && hi) return (*lo + *hi) / 2;
  if (lo) return *lo + 1;
  if (hi) return *hi - 1;
  return 0;
}

bool fm_solve(std::vector<Lin> cons, std::map<unsigned, Rational>* witness) {
  std::vector<Step> steps;
  // equations first, by substitution
  while (true) {
    auto it = std::find_if(cons.begin(), cons.end(), [](const Lin& l) { return l.rel == Rel::Eq; });
    if (it == cons.end()) break;
    Lin eq = *it;
    cons.erase(it);
    if (eq.a.empty()) {
      if (eq.c != 0) return false;
      continue;
    }
    auto [v, av] = *eq.a.begin();
    for (auto& l : cons) {
      auto f = l.a.find(v);
      if (f != l.a.end()) add_scaled(l, eq, -f->second / av);
    }
    steps.push_back({v, true, {eq}});
  }
  while (true) {
    std::vector<Lin> next;
    std::set<unsigned> vars;
    for (const auto& l : cons) {
      if (l.a.empty()) {
        if (!holds(l.rel, l.c)) return false;
        continue;
      }
      for (const auto& [v, k] : l.a) vars.insert(v);
    }
    if (vars.empty()) break;
    unsigned best = *vars.begin();
    std::optional<long> best_cost;
    for (unsigned v : vars) {
      long pos = 0;
      long neg = 0;
      for (const auto& l : cons) {
        auto f = l.a.find(v);
        if (f == l.a.end()) continue;
        (f->second > 0 ? pos : neg)++;
      }
      long cost = pos * neg - pos - neg;
      if (!best_cost || cost < *best_cost) {
        best = v;
        best_cost = cost;
      }
    }
    std::vector<Lin> lower;
    std::vector<Lin> upper;
    for (auto& l : cons) {
      if (l.a.empty()) continue;
      auto f = l.a.find(best);
      if (f == l.a.end()) {
        next.push_back(l);
      } else if (f->second > 0) {
        lower.push_back(l);
      } else {
        upper.push_back(l);
      }
    }
    for (const auto& lo : lower) {
      for (const auto& up : upper) {
        Lin c = lo;
        c.a.clear();
        c.c = 0;
        add_scaled(c, lo, -up.a.at(best));
        add_scaled(c, up, lo.a.at(best));
        c.a.erase(best);
        c.rel = (lo.rel == Rel::Gt || up.rel == Rel::Gt) ? Rel::Gt : Rel::Ge;
        next.push_back(canonical(c));
      }
    }
    std::sort(next.begin(), next.end(), lin_less);
    next.erase(std::unique(next.begin(), next.end(),
                           [](const Lin& x, const Lin& y) { return !lin_less(x, y) && !lin_less(y, x); }),
               next.end());
    if (next.size() > kMaxConstraints) throw TooLarge{};
    Step s{best, false, lower};
    s.cons.insert(s.cons.end(), upper.begin(), upper.end());
    steps.push_back(std::move(s));
    cons = std::move(next);
  }
  if (!witness) return true;
  std::map<unsigned, Rational>& val = *witness;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const Step& s = *it;
    if (s.equation) {
      const Lin& eq = s.cons[0];
      Rational r = eq.c;
      Rational av;
      for (const auto& [v, k] : eq.a) {
        if (v == s.var) {
          av = k;
        } else {
          r += k * val[v];
        }
      }
      val[s.var] = -r / av;
      continue;
    }
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    bool lo_strict = false;
    bool hi_strict = false;
    for (const auto& l : s.cons) {
      Rational r = l.c;
      Rational av;
      for (const auto& [v, k] : l.a) {
        if (v == s.var) {
          av = k;
        } else {
          r += k * val[v];
        }
      }
      Rational bound = -r / av;
      bool strict = l.rel == Rel::Gt;
      if (av > 0) {
        if (!lo || bound > *lo || (bound == *lo && strict)) {
          lo = bound;
          lo_strict = strict;
        }
      } else {
        if (!hi || bound < *hi || (bound == *hi && strict)) {
          hi = bound;
          hi_strict = strict;
        }
      }
    }
    val[s.var] = pick(lo, lo_strict, hi, hi_strict);
  }
  return true;
}

}  // namespace

bool is_trivial(const Constraint& c, bool& value) {
  if (!c.p.is_constant()) return false;
  value = holds(c.rel, c.p.constant_term());
  return true;
}

namespace {

RatFn term_fn(Normalizer& n, const Expr& t, std::vector<Poly>& guards, bool& undefined) {
  switch (t.op()) {
    case Op::Num: return {Poly::constant(t.num()), Poly::constant(1)};
    case Op::Var: return {Poly::atom(n.atoms.intern(t)), Poly::constant(1)};
    case Op::Neg: {
      RatFn a = term_fn(n, t.child(0), guards, undefined);
      return {-a.num, a.den};
    }
    case Op::Power: {
      RatFn a = term_fn(n, t.child(0), guards, undefined);
      auto k = static_cast<unsigned>(numerator_of(t.child(1).num()));
      return normalized(a.num.pow(k), a.den.pow(k));
    }
    case Op::Plus:
    case Op::Minus: {
      RatFn a = term_fn(n, t.child(0), guards, undefined);
      RatFn b = term_fn(n, t.child(1), guards, undefined);
      Poly sb = t.op() == Op::Plus ? b.num : -b.num;
      if (a.den == b.den) return {a.num + sb, a.den};
      return normalized(a.num * b.den + sb * a.den, a.den * b.den);
    }
    case Op::Times: {
      RatFn a = term_fn(n, t.child(0), guards, undefined);
      RatFn b = term_fn(n, t.child(1), guards, undefined);
      return normalized(a.num * b.num, a.den * b.den);
    }
    case Op::Divide: {
      RatFn a = term_fn(n, t.child(0), guards, undefined);
      RatFn b = term_fn(n, t.child(1), guards, undefined);
      if (b.num.is_zero()) {
        undefined = true;
        return {Poly(), Poly::constant(1)};
      }
      if (!b.num.is_constant()) guards.push_back(b.num);
      return normalized(a.num * b.den, a.den * b.num);
    }
    default:
      n.opaque_terms = true;
      return {Poly::atom(n.atoms.intern(t)), Poly::constant(1)};
  }
}

}  // namespace

Dnf Normalizer::atom(const Expr& f, bool positive) {
  std::vector<Poly> guards;
  bool undefined = false;
  RatFn l = term_fn(*this, f.child(0), guards, undefined);
  RatFn r = term_fn(*this, f.child(1), guards, undefined);
  if (undefined) return positive ? Dnf{} : Dnf{Conj{}};
  Poly num = l.num * r.den - r.num * l.den;
  Poly den = l.den * r.den;
  Poly p = den.is_constant() ? num.scaled(1 / den.constant_term()) : num * den;
  Rel rel = Rel::Ge;
  switch (f.cmp()) {
    case CmpOp::Eq: rel = Rel::Eq; break;
    case CmpOp::Ne: rel = Rel::Ne; break;
    case CmpOp::Gt: rel = Rel::Gt; break;
    case CmpOp::Ge: rel = Rel::Ge; break;
    case CmpOp::Lt: rel = Rel::Gt; p = -p; break;
    case CmpOp::Le: rel = Rel::Ge; p = -p; break;
  }
  auto lit = [](Poly q, Rel r) {
    Lit x;
    x.c = {std::move(q), r};
    return x;
  };
  if (positive) {
    Conj c;
    for (const auto& g : guards) c.push_back(lit(g, Rel::Ne));
    c.push_back(lit(p, rel));
    return {c};
  }
  Dnf d;
  for (const auto& g : guards) d.push_back({lit(g, Rel::Eq)});
  switch (rel) {
    case Rel::Eq: d.push_back({lit(p, Rel::Ne)}); break;
    case Rel::Ne: d.push_back({lit(p, Rel::Eq)}); break;
    case Rel::Gt: d.push_back({lit(-p, Rel::Ge)}); break;
    case Rel::Ge: d.push_back({lit(-p, Rel::Gt)}); break;
  }
  return d;
}

Dnf Normalizer::formula(const Expr& f, bool positive) {
  switch (f.op()) {
    case Op::True: return positive ? Dnf{Conj{}} : Dnf{};
    case Op::False: return positive ? Dnf{} : Dnf{Conj{}};
    case Op::Cmp: return atom(f, positive);
    case Op::Not: return formula(f.child(0), !positive);
    case Op::And:
      return positive ? product(formula(f.child(0), true), formula(f.child(1), true))
                      : both(formula(f.child(0), false), formula(f.child(1), false));
    case Op::Or:
      return positive ? both(formula(f.child(0), true), formula(f.child(1), true))
                      : product(formula(f.child(0), false), formula(f.child(1), false));
    case Op::Imply:
      return positive ? both(formula(f.child(0), false), formula(f.child(1), true))
                      : product(formula(f.child(0), true), formula(f.child(1), false));
    case Op::Equiv: {
      Dnf a = formula(f.child(0), true);
      Dnf na = formula(f.child(0), false);
      Dnf b = formula(f.child(1), true);
      Dnf nb = formula(f.child(1), false);
      return positive ? both(product(a, b), product(na, nb)) : both(product(a, nb), product(na, b));
    }
    default: {
      opaque_props = true;
      Lit l;
      l.opaque = true;
      l.atom = f;
      l.positive = positive;
      return {{l}};
    }
  }
}

Dnf Normalizer::sequent(const Sequent& s) {
  Dnf d{Conj{}};
  for (const auto& a : s.ante) d = simplify(product(d, formula(a, true)));
  for (const auto& b : s.succ) d = simplify(product(d, formula(b, false)));
  return d;
}

Dnf Normalizer::simplify(Dnf d) {
  Dnf r;
  for (auto& c : d) {
    Conj out;
    bool dead = false;
    for (auto& l : c) {
      if (l.opaque) {
        for (const auto& o : out)
          if (o.opaque && o.atom == l.atom && o.positive != l.positive) dead = true;
        out.push_back(std::move(l));
        continue;
      }
      bool value = false;
      if (is_trivial(l.c, value)) {
        if (!value) dead = true;
        continue;
      }
      out.push_back(std::move(l));
    }
    if (!dead) r.push_back(std::move(out));
  }
  return r;
}

std::vector<Constraint> constraints_of(const Conj& c) {
  std::vector<Constraint> r;
  for (const auto& l : c)
    if (!l.opaque) r.push_back(l.c);
  return r;
}

bool linear_satisfiable(const std::vector<Constraint>& cs, std::map<unsigned, Rational>* witness) {
  std::vector<Lin> base;
  std::vector<const Poly*> diseq;
  for (const auto& c : cs) {
    if (c.rel == Rel::Ne) {
      diseq.push_back(&c.p);
    } else {
      base.push_back(to_lin(c.p, c.rel));
    }
  }
  if (diseq.size() > kMaxSplits) throw TooLarge{};
  for (std::size_t mask = 0; mask < (std::size_t{1} << diseq.size()); ++mask) {
    std::vector<Lin> cons = base;
    for (std::size_t k = 0; k < diseq.size(); ++k)
      cons.push_back(to_lin(((mask >> k) & 1U) ? -*diseq[k] : *diseq[k], Rel::Gt));
    std::map<unsigned, Rational> w;
    if (fm_solve(cons, witness ? &w : nullptr)) {
      if (witness) *witness = std::move(w);
      return true;
    }
  }
  return false;
}

namespace {

enum SignBits : unsigned { kNeg = 1, kZero = 2, kPos = 4, kAny = 7 };

unsigned sign_of_bound(Rel rel, const Rational& a, const Rational& c) {
  // a*v + c rel 0
  Rational b = -c / a;
  bool up = a < 0;  // v rel' b with the direction flipped
  switch (rel) {
    case Rel::Eq: return b > 0 ? kPos : (b < 0 ? kNeg : kZero);
    case Rel::Ne: return b == 0 ? (kNeg | kPos) : kAny;
    case Rel::Gt:
      if (!up) return b >= 0 ? kPos : kAny;
      return b <= 0 ? kNeg : kAny;
    case Rel::Ge:
      if (!up) return b > 0 ? kPos : (b == 0 ? (kPos | kZero) : kAny);
      return b < 0 ? kNeg : (b == 0 ? (kNeg | kZero) : kAny);
  }
  return kAny;
}

unsigned sign_product(unsigned x, unsigned y) {
  unsigned r = 0;
  for (unsigned a : {kNeg, kZero, kPos}) {
    if (!(x & a)) continue;
    for (unsigned b : {kNeg, kZero, kPos}) {
      if (!(y & b)) continue;
      if (a == kZero || b == kZero) {
        r |= kZero;
      } else {
        r |= (a == b) ? kPos : kNeg;
      }
    }
  }
  return r;
}

unsigned sign_power(unsigned x, unsigned e) {
  if (e == 0) return kPos;
  if (e % 2 == 1) return x;
  return ((x & kZero) ? unsigned{kZero} : 0U) | ((x & (kNeg | kPos)) ? unsigned{kPos} : 0U);
}

}  // namespace

bool heuristic_unsat(std::vector<Constraint> cs, AtomTable& atoms) {
  // equation substitution
  for (int round = 0; round < 32; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < cs.size() && !changed; ++i) {
      if (cs[i].rel != Rel::Eq) continue;
      for (unsigned v : cs[i].p.atoms()) {
        Rational a;
        Poly rest;
        if (!cs[i].p.linear_in(v, a, rest)) continue;
        Poly value = rest.scaled(-1 / a);
        std::vector<Constraint> next;
        for (std::size_t j = 0; j < cs.size(); ++j)
          if (j != i) next.push_back({cs[j].p.substitute(v, value), cs[j].rel});
        cs = std::move(next);
        changed = true;
        break;
      }
    }
    std::vector<Constraint> kept;
    for (auto& c : cs) {
      bool value = false;
      if (is_trivial(c, value)) {
        if (!value) return true;
        continue;
      }
      kept.push_back(std::move(c));
    }
    cs = std::move(kept);
    if (!changed) break;
  }
  bool linear = std::all_of(cs.begin(), cs.end(), [](const Constraint& c) { return c.p.is_linear(); });
  if (linear) return !linear_satisfiable(cs, nullptr);

  std::map<unsigned, unsigned> sign;
  for (const auto& c : cs) {
    if (c.p.degree() != 1) continue;
    auto vs = c.p.atoms();
    if (vs.size() != 1) continue;
    Rational a;
    Poly rest;
    if (!c.p.linear_in(vs[0], a, rest)) continue;
    unsigned s = sign_of_bound(c.rel, a, rest.constant_term());
    auto it = sign.find(vs[0]);
    sign[vs[0]] = (it == sign.end() ? kAny : it->second) & s;
  }
  auto sign_at = [&](unsigned v) {
    auto it = sign.find(v);
    return it == sign.end() ? unsigned{kAny} : it->second;
  };

  std::map<Monomial, unsigned> mono;
  std::vector<Constraint> lin;
  for (const auto& c : cs) {
    Poly q;
    for (const auto& [m, k] : c.p.terms()) {
      unsigned deg = 0;
      for (const auto& [v, e] : m) deg += e;
      if (deg <= 1) {
        Poly t = Poly::constant(k);
        if (!m.empty()) t = Poly::atom(m.begin()->first).scaled(k);
        q = q + t;
        continue;
      }
      auto it = mono.find(m);
      unsigned idx = it == mono.end() ? mono.emplace(m, atoms.fresh()).first->second : it->second;
      q = q + Poly::atom(idx).scaled(k);
    }
    lin.push_back({q, c.rel});
  }
  for (const auto& [m, idx] : mono) {
    unsigned s = kPos;
    for (const auto& [v, e] : m) s = sign_product(s, sign_power(sign_at(v), e));
    Poly x = Poly::atom(idx);
    switch (s) {
      case kPos: lin.push_back({x, Rel::Gt}); break;
      case kPos | kZero: lin.push_back({x, Rel::Ge}); break;
      case kNeg: lin.push_back({-x, Rel::Gt}); break;
      case kNeg | kZero: lin.push_back({-x, Rel::Ge}); break;
      case kZero: lin.push_back({x, Rel::Eq}); break;
      case kNeg | kPos: lin.push_back({x, Rel::Ne}); break;
      default: break;
    }
  }
  return !linear_satisfiable(lin, nullptr);
}

Assignment assignment_of(const AtomTable& atoms, const std::map<unsigned, Rational>& w) {
  Assignment a;
  for (const auto& [i, v] : w)
    if (i < atoms.size() && atoms.is_variable(i)) a[atoms.term(i).var()] = v;
  return a;
}

}  // namespace detail

using namespace detail;

std::optional<bool> evaluate(const Expr& formula, const Assignment& values) {
  try {
    return eval_formula(formula, values);
  } catch (const NotArithmetic&) {
    return std::nullopt;
  }
}

std::optional<bool> evaluate(const Sequent& s, const Assignment& values) { return evaluate(s.as_formula(), values); }

bool is_ground(const Sequent& s) { return all_vars(s).empty() && signature(s).empty(); }

OracleVerdict decide_ground(const Sequent& goal) {
  if (!is_ground(goal)) throw ArithError("decide_ground: sequent is not ground: " + print(goal));
  auto v = evaluate(goal, {});
  if (!v) throw ArithError("decide_ground: sequent is not arithmetic: " + print(goal));
  return VerdictFactory::make(*v ? VerdictStatus::Valid : VerdictStatus::NotValid, OracleKind::BuiltinGround, goal);
}

OracleVerdict decide_linear(const Sequent& goal) {
  auto unknown = [&] { return VerdictFactory::make(VerdictStatus::Unknown, OracleKind::BuiltinLinear, goal); };
  try {
    Normalizer n;
    Dnf d = n.sequent(goal);
    for (const auto& c : d)
      for (const auto& l : c)
        if (!l.opaque && !l.c.p.is_linear()) return unknown();
    for (const auto& c : d) {
      std::map<unsigned, Rational> w;
      if (!linear_satisfiable(constraints_of(c), &w)) continue;
      if (n.opaque_terms || n.opaque_props) return unknown();
      Assignment a = assignment_of(n.atoms, w);
      auto value = evaluate(goal, a);
      if (value && !*value)
        return VerdictFactory::make(VerdictStatus::NotValid, OracleKind::BuiltinLinear, goal, std::move(a));
      return unknown();
    }
    return VerdictFactory::make(VerdictStatus::Valid, OracleKind::BuiltinLinear, goal);
  } catch (const TooLarge&) {
    return unknown();
  }
}

OracleVerdict decide_heuristic(const Sequent& goal) {
  auto unknown = [&] { return VerdictFactory::make(VerdictStatus::Unknown, OracleKind::BuiltinHeuristic, goal); };
  try {
    Normalizer n;
    Dnf d = n.sequent(goal);
    for (const auto& c : d)
      if (!heuristic_unsat(constraints_of(c), n.atoms)) return unknown();
    return VerdictFactory::make(VerdictStatus::Valid, OracleKind::BuiltinHeuristic, goal);
  } catch (const TooLarge&) {
    return unknown();
  }
}

OracleVerdict ArithOracle::qe(const Sequent& goal) {
  std::string key = print(goal);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  std::optional<OracleVerdict> v;
  if (is_ground(goal) && evaluate(goal, {})) v = decide_ground(goal);
  if (!v) {
    OracleVerdict lin = decide_linear(goal);
    if (lin.status() != VerdictStatus::Unknown) v = lin;
  }
  if (!v) {
    OracleVerdict h = decide_heuristic(goal);
    if (h.status() != VerdictStatus::Unknown) v = h;
  }
  if (!v && !config_.smt_command.empty()) {
    try {
      v = smt_check(goal, config_.smt_timeout, config_.smt_command);
    } catch (const ArithError&) {
      v.reset();
    }
  }
  if (!v) v = VerdictFactory::make(VerdictStatus::Unknown, OracleKind::BuiltinHeuristic, goal);
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(key, *v);
  return *v;
}

std::size_t ArithOracle::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

OracleVerdict qe(const Sequent& goal) {
  static ArithOracle builtin;
  return builtin.qe(goal);
}

}  // namespace usp
