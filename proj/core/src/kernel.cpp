#include "usp/kernel.hpp"

#include <algorithm>
#include <mutex>

#include "usp/parser.hpp"
#include "usp/printer.hpp"
#include "usp/static_semantics.hpp"

namespace usp {

namespace kernel {

struct KernelAccess {
  static Provable make(Sequent c, std::vector<Sequent> s, std::vector<std::string> o = {}) {
    return Provable(std::move(c), std::move(s), std::move(o));
  }
  static std::vector<Sequent>& subgoals(Provable& p) { return p.subgoals_; }
  static std::vector<std::string>& oracles(Provable& p) { return p.oracles_; }
  static Sequent& conclusion(Provable& p) { return p.conclusion_; }
};

}  // namespace kernel

using kernel::KernelAccess;

std::string Provable::str() const {
  std::string s = "Provable(" + print(conclusion_);
  if (subgoals_.empty()) return s + " proved)";
  s += " from";
  for (const auto& g : subgoals_) s += "\n  " + print(g);
  return s + ")";
}

const char* rule_name(RuleKind k) {
  switch (k) {
    case RuleKind::ImplyR: return "implyR";
    case RuleKind::AndR: return "andR";
    case RuleKind::OrR: return "orR";
    case RuleKind::NotR: return "notR";
    case RuleKind::EquivR: return "equivR";
    case RuleKind::ImplyL: return "implyL";
    case RuleKind::AndL: return "andL";
    case RuleKind::OrL: return "orL";
    case RuleKind::NotL: return "notL";
    case RuleKind::EquivL: return "equivL";
    case RuleKind::Close: return "id";
    case RuleKind::CloseTrue: return "closeTrue";
    case RuleKind::CloseFalse: return "closeFalse";
    case RuleKind::Cut: return "cut";
    case RuleKind::HideL: return "hideL";
    case RuleKind::HideR: return "hideR";
    case RuleKind::Monotone: return "monb";
    case RuleKind::LoopInduction: return "loop";
    case RuleKind::DW: return "dW";
    case RuleKind::DI: return "dI";
    case RuleKind::DC: return "dC";
    case RuleKind::Dbx: return "dbx";
  }
  return "?";
}

std::string Rule::str() const {
  std::string s = rule_name(kind);
  s += "(" + std::to_string(index);
  if (kind == RuleKind::Close) s += "," + std::to_string(other);
  if (formula.valid()) s += ", " + print(formula);
  return s + ")";
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw KernelError(msg); }

const Sequent& subgoal(const Provable& p, std::size_t i) {
  if (i >= p.subgoals().size())
    fail("subgoal index " + std::to_string(i) + " out of range (" + std::to_string(p.subgoals().size()) + " open)");
  return p.subgoals()[i];
}

const Expr& at(const std::vector<Expr>& fs, std::size_t i, const char* side) {
  if (i >= fs.size()) fail(std::string(side) + " position " + std::to_string(i) + " out of range");
  return fs[i];
}

const Expr& expect(const Expr& f, Op op, const char* rule) {
  if (f.op() != op) fail(std::string(rule) + " does not apply to " + print(f));
  return f;
}

std::vector<Expr> without(const std::vector<Expr>& fs, std::size_t i) {
  std::vector<Expr> r = fs;
  r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
  return r;
}

std::vector<Expr> replaced(const std::vector<Expr>& fs, std::size_t i, const Expr& f) {
  std::vector<Expr> r = fs;
  r[i] = f;
  return r;
}

std::vector<Expr> appended(std::vector<Expr> fs, const Expr& f) {
  fs.push_back(f);
  return fs;
}

bool has_dependent_symbols(const Expr& e) {
  for (const auto& s : signature(e))
    if (s.kind == SymbolKind::Program || s.space == Space::Wild) return true;
  return false;
}

bool has_dependent_symbols(const Sequent& s) {
  for (const auto& f : s.ante)
    if (has_dependent_symbols(f)) return true;
  for (const auto& f : s.succ)
    if (has_dependent_symbols(f)) return true;
  return false;
}

std::vector<std::string> merge_oracles(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

Provable splice(const Provable& p, std::size_t i, std::vector<Sequent> premises,
                const std::vector<std::string>& oracles = {}) {
  std::vector<Sequent> subs;
  subs.reserve(p.subgoals().size() + premises.size());
  for (std::size_t k = 0; k < p.subgoals().size(); ++k) {
    if (k == i) {
      for (auto& s : premises) subs.push_back(std::move(s));
    } else {
      subs.push_back(p.subgoals()[k]);
    }
  }
  return KernelAccess::make(p.conclusion(), std::move(subs), merge_oracles(p.oracles(), oracles));
}

// ---- Lie derivatives (light simplification, never of divisions) ----

bool is_num(const Expr& e, long v) { return e.op() == Op::Num && e.num() == v; }

Expr s_plus(const Expr& a, const Expr& b) {
  if (is_num(a, 0)) return b;
  if (is_num(b, 0)) return a;
  if (a.op() == Op::Num && b.op() == Op::Num) return mk::num(a.num() + b.num());
  return mk::plus(a, b);
}

Expr s_neg(const Expr& a) {
  if (a.op() == Op::Num) return mk::num(-a.num());
  return mk::neg(a);
}

Expr s_minus(const Expr& a, const Expr& b) {
  if (is_num(b, 0)) return a;
  if (is_num(a, 0)) return s_neg(b);
  if (a.op() == Op::Num && b.op() == Op::Num) return mk::num(a.num() - b.num());
  return mk::minus(a, b);
}

Expr s_times(const Expr& a, const Expr& b) {
  if (is_num(a, 0) || is_num(b, 0)) return mk::num(0L);
  if (is_num(a, 1)) return b;
  if (is_num(b, 1)) return a;
  if (a.op() == Op::Num && b.op() == Op::Num) return mk::num(a.num() * b.num());
  return mk::times(a, b);
}

Expr s_power(const Expr& a, unsigned n) {
  if (n == 0) return mk::num(1L);
  if (n == 1) return a;
  return mk::power(a, mk::num(static_cast<long>(n)));
}

VarSet ode_bound(const Expr& ode) { return bound_vars(ode); }

Expr lie(const Expr& ode, const Expr& t) {
  switch (t.op()) {
    case Op::Num: return mk::num(0L);
    case Op::Var: {
      if (t.var().primed) fail("Lie derivative undefined for differential symbol " + t.var().str());
      auto vars = ode.ode_vars();
      for (std::size_t k = 0; k < vars.size(); ++k)
        if (vars[k] == t.var()) return ode.ode_rhs()[k];
      return mk::num(0L);
    }
    case Op::Func:
      if (t.symbol().space == Space::Wild || free_vars(t).intersects(ode_bound(ode)))
        fail("Lie derivative undefined for " + print(t));
      return mk::num(0L);
    case Op::Plus: return s_plus(lie(ode, t.child(0)), lie(ode, t.child(1)));
    case Op::Minus: return s_minus(lie(ode, t.child(0)), lie(ode, t.child(1)));
    case Op::Neg: return s_neg(lie(ode, t.child(0)));
    case Op::Times:
      return s_plus(s_times(lie(ode, t.child(0)), t.child(1)), s_times(t.child(0), lie(ode, t.child(1))));
    case Op::Divide: {
      const Expr& d = t.child(1);
      if (d.op() != Op::Num || d.num() == 0) fail("Lie derivative needs a nonzero literal denominator in " + print(t));
      Expr n = lie(ode, t.child(0));
      if (is_num(n, 0)) return n;
      return mk::divide(n, d);
    }
    case Op::Power: {
      unsigned n = static_cast<unsigned>(numerator_of(t.child(1).num()));
      if (n == 0) return mk::num(0L);
      Expr inner = lie(ode, t.child(0));
      return s_times(s_times(mk::num(static_cast<long>(n)), s_power(t.child(0), n - 1)), inner);
    }
    default: fail("Lie derivative undefined for " + print(t));
  }
}

// Polynomial term over variables and constant symbols: a safe Darboux cofactor.
bool polynomial_term(const Expr& t) {
  switch (t.op()) {
    case Op::Num: return true;
    case Op::Var: return !t.var().primed;
    case Op::Func: return t.symbol().space == Space::Applied && t.arity() == 0;
    case Op::Plus:
    case Op::Minus:
    case Op::Times: return polynomial_term(t.child(0)) && polynomial_term(t.child(1));
    case Op::Neg:
    case Op::Power: return polynomial_term(t.child(0));
    case Op::Divide: return polynomial_term(t.child(0)) && t.child(1).op() == Op::Num && t.child(1).num() != 0;
    default: return false;
  }
}

// Context formulas that the ODE cannot change.
std::vector<Expr> constant_part(const std::vector<Expr>& fs, const VarSet& bound) {
  std::vector<Expr> r;
  for (const auto& f : fs)
    if (!free_vars(f).intersects(bound)) r.push_back(f);
  return r;
}

struct OdeGoal {
  Expr ode;
  Expr post;
  Expr domain;
};

OdeGoal ode_goal(const Sequent& g, std::size_t i, const char* rule) {
  const Expr& f = expect(at(g.succ, i, "succedent"), Op::Box, rule);
  if (f.child(0).op() != Op::Ode) fail(std::string(rule) + " needs a differential equation box: " + print(f));
  return {f.child(0), f.child(1), f.child(0).ode_domain()};
}

Expr with_domain(const Expr& ode, const Expr& domain) {
  std::vector<Expr> kids(ode.children().begin(), ode.children().end());
  kids.back() = domain;
  return mk::with_children(ode, std::move(kids));
}

std::vector<Expr> assume_domain(std::vector<Expr> ante, const Expr& domain) {
  if (domain.op() != Op::True) ante.push_back(domain);
  return ante;
}

std::vector<Sequent> premises(const Sequent& g, const Rule& r) {
  const char* name = rule_name(r.kind);
  switch (r.kind) {
    case RuleKind::ImplyR: {
      const Expr& f = expect(at(g.succ, r.index, "succedent"), Op::Imply, name);
      return {Sequent(appended(g.ante, f.child(0)), replaced(g.succ, r.index, f.child(1)))};
    }
    case RuleKind::AndR: {
      const Expr& f = expect(at(g.succ, r.index, "succedent"), Op::And, name);
      return {Sequent(g.ante, replaced(g.succ, r.index, f.child(0))),
              Sequent(g.ante, replaced(g.succ, r.index, f.child(1)))};
    }
    case RuleKind::OrR: {
      const Expr& f = expect(at(g.succ, r.index, "succedent"), Op::Or, name);
      auto succ = replaced(g.succ, r.index, f.child(0));
      succ.insert(succ.begin() + static_cast<std::ptrdiff_t>(r.index) + 1, f.child(1));
      return {Sequent(g.ante, succ)};
    }
    case RuleKind::NotR: {
      const Expr& f = expect(at(g.succ, r.index, "succedent"), Op::Not, name);
      return {Sequent(appended(g.ante, f.child(0)), without(g.succ, r.index))};
    }
    case RuleKind::EquivR: {
      const Expr& f = expect(at(g.succ, r.index, "succedent"), Op::Equiv, name);
      return {Sequent(appended(g.ante, f.child(0)), replaced(g.succ, r.index, f.child(1))),
              Sequent(appended(g.ante, f.child(1)), replaced(g.succ, r.index, f.child(0)))};
    }
    case RuleKind::ImplyL: {
      const Expr& f = expect(at(g.ante, r.index, "antecedent"), Op::Imply, name);
      return {Sequent(without(g.ante, r.index), appended(g.succ, f.child(0))),
              Sequent(replaced(g.ante, r.index, f.child(1)), g.succ)};
    }
    case RuleKind::AndL: {
      const Expr& f = expect(at(g.ante, r.index, "antecedent"), Op::And, name);
      auto ante = replaced(g.ante, r.index, f.child(0));
      ante.insert(ante.begin() + static_cast<std::ptrdiff_t>(r.index) + 1, f.child(1));
      return {Sequent(ante, g.succ)};
    }
    case RuleKind::OrL: {
      const Expr& f = expect(at(g.ante, r.index, "antecedent"), Op::Or, name);
      return {Sequent(replaced(g.ante, r.index, f.child(0)), g.succ),
              Sequent(replaced(g.ante, r.index, f.child(1)), g.succ)};
    }
    case RuleKind::NotL: {
      const Expr& f = expect(at(g.ante, r.index, "antecedent"), Op::Not, name);
      return {Sequent(without(g.ante, r.index), appended(g.succ, f.child(0)))};
    }
    case RuleKind::EquivL: {
      const Expr& f = expect(at(g.ante, r.index, "antecedent"), Op::Equiv, name);
      Expr both = mk::land(f.child(0), f.child(1));
      Expr neither = mk::land(mk::lnot(f.child(0)), mk::lnot(f.child(1)));
      return {Sequent(replaced(g.ante, r.index, both), g.succ), Sequent(replaced(g.ante, r.index, neither), g.succ)};
    }
    case RuleKind::Close:
      if (at(g.ante, r.index, "antecedent") != at(g.succ, r.other, "succedent"))
        fail("id: " + print(g.ante[r.index]) + " and " + print(g.succ[r.other]) + " differ");
      return {};
    case RuleKind::CloseTrue:
      expect(at(g.succ, r.index, "succedent"), Op::True, name);
      return {};
    case RuleKind::CloseFalse:
      expect(at(g.ante, r.index, "antecedent"), Op::False, name);
      return {};
    case RuleKind::Cut:
      if (!r.formula.valid() || !r.formula.is_formula()) fail("cut needs a formula");
      return {Sequent(appended(g.ante, r.formula), g.succ), Sequent(g.ante, appended(g.succ, r.formula))};
    case RuleKind::HideL:
      at(g.ante, r.index, "antecedent");
      return {Sequent(without(g.ante, r.index), g.succ)};
    case RuleKind::HideR:
      at(g.succ, r.index, "succedent");
      return {Sequent(g.ante, without(g.succ, r.index))};
    case RuleKind::Monotone: {
      if (g.ante.size() != 1 || g.succ.size() != 1) fail("monb needs exactly [a]Q ==> [a]P");
      const Expr& q = expect(g.ante[0], Op::Box, name);
      const Expr& p = expect(g.succ[0], Op::Box, name);
      if (q.child(0) != p.child(0)) fail("monb: programs differ");
      return {Sequent({q.child(1)}, {p.child(1)})};
    }
    case RuleKind::LoopInduction: {
      const Expr& f = expect(at(g.succ, r.index, "succedent"), Op::Box, name);
      if (f.child(0).op() != Op::Loop) fail("loop needs a [a*]P formula: " + print(f));
      if (!r.formula.valid() || !r.formula.is_formula()) fail("loop needs an invariant formula");
      const Expr& j = r.formula;
      return {Sequent(g.ante, replaced(g.succ, r.index, j)),
              Sequent({j}, {mk::box(f.child(0).child(0), j)}),
              Sequent({j}, {f.child(1)})};
    }
    case RuleKind::DW: {
      OdeGoal o = ode_goal(g, r.index, name);
      VarSet b = ode_bound(o.ode);
      auto succ = constant_part(without(g.succ, r.index), b);
      succ.insert(succ.begin(), o.post);
      return {Sequent(assume_domain(constant_part(g.ante, b), o.domain), succ)};
    }
    case RuleKind::DC: {
      OdeGoal o = ode_goal(g, r.index, name);
      if (!r.formula.valid() || !r.formula.is_formula()) fail("dC needs a formula");
      Expr refined = o.domain.op() == Op::True ? r.formula : mk::land(o.domain, r.formula);
      return {Sequent(g.ante, replaced(g.succ, r.index, mk::box(with_domain(o.ode, refined), o.post))),
              Sequent(g.ante, replaced(g.succ, r.index, mk::box(o.ode, r.formula)))};
    }
    case RuleKind::DI:
    case RuleKind::Dbx: {
      OdeGoal o = ode_goal(g, r.index, name);
      const Expr& c = o.post;
      if (c.op() != Op::Cmp) fail(std::string(name) + " needs a comparison postcondition: " + print(c));
      CmpOp op = c.cmp();
      if (op == CmpOp::Ne) fail(std::string(name) + " does not handle !=");
      Expr lhs = c.child(0);
      Expr rhs = c.child(1);
      if (op == CmpOp::Le || op == CmpOp::Lt) {
        std::swap(lhs, rhs);
        op = flip(op);
      }
      if (!polynomial_term(lhs) || !polynomial_term(rhs))
        fail(std::string(name) + " needs polynomial terms: " + print(c));
      VarSet b = ode_bound(o.ode);
      auto ctx = assume_domain(constant_part(g.ante, b), o.domain);
      Sequent init(assume_domain(g.ante, o.domain), replaced(g.succ, r.index, c));
      Expr step;
      CmpOp dop = op == CmpOp::Eq ? CmpOp::Eq : CmpOp::Ge;
      if (r.kind == RuleKind::DI) {
        step = mk::cmp(dop, lie(o.ode, lhs), lie(o.ode, rhs));
      } else {
        if (!r.formula.valid() || !r.formula.is_term() || !polynomial_term(r.formula))
          fail("dbx needs a polynomial cofactor term");
        Expr e = is_num(rhs, 0) ? lhs : mk::minus(lhs, rhs);
        step = mk::cmp(dop, lie(o.ode, e), s_times(r.formula, e));
      }
      return {init, Sequent(ctx, {step})};
    }
  }
  fail("unknown rule");
}

Expr replace_at(const Expr& f, const std::vector<std::size_t>& path, std::size_t depth, const Expr& from,
                const Expr& to) {
  if (depth == path.size()) {
    if (f != from) fail("rewrite: subformula " + print(f) + " does not match " + print(from));
    return to;
  }
  std::size_t k = path[depth];
  if (k >= f.arity()) fail("rewrite: position path out of range");
  std::vector<Expr> kids(f.children().begin(), f.children().end());
  kids[k] = replace_at(kids[k], path, depth + 1, from, to);
  return mk::with_children(f, std::move(kids));
}

std::vector<AxiomEntry> build_axioms() {
  static const std::pair<const char*, const char*> kTable[] = {
      {"testb", "[?q(||);]p(||) <-> (q(||) -> p(||))"},
      {"choiceb", "[a;++b;]p(||) <-> [a;]p(||) & [b;]p(||)"},
      {"composeb", "[a;b;]p(||) <-> [a;][b;]p(||)"},
      {"assignb", "[x:=f();]p(x) <-> p(f())"},
      {"iterateb", "[{a;}*]p(||) <-> p(||) & [a;][{a;}*]p(||)"},
      {"K", "[a;](p(||) -> q(||)) -> ([a;]p(||) -> [a;]q(||))"},
      {"boxTrue", "[a;]true"},
      {"diamond", "<a;>p(||) <-> ![a;]!p(||)"},
      {"DW", "[{x'=f(x)&q(x)}]q(x)"},
      {"DI>=", "[{x'=f(x)&q(x)}](g(x))'>=(h(x))' -> (q(x) -> g(x)>=h(x)) -> [{x'=f(x)&q(x)}]g(x)>=h(x)"},
      {"DI>", "[{x'=f(x)&q(x)}](g(x))'>=(h(x))' -> (q(x) -> g(x)>h(x)) -> [{x'=f(x)&q(x)}]g(x)>h(x)"},
      {"DI=", "[{x'=f(x)&q(x)}](g(x))'=(h(x))' -> (q(x) -> g(x)=h(x)) -> [{x'=f(x)&q(x)}]g(x)=h(x)"},
      {"DC", "[{x'=f(x)&q(x)}]r(x) -> ([{x'=f(x)&q(x)}]p(x) <-> [{x'=f(x)&q(x)&r(x)}]p(x))"},
      {"dbx>=", "[{x'=f(x)&q(x)}](g(x))'>=c(x)*g(x) -> (g(x)>=0 -> [{x'=f(x)&q(x)}]g(x)>=0)"},
      {"dbx>", "[{x'=f(x)&q(x)}](g(x))'>=c(x)*g(x) -> (g(x)>0 -> [{x'=f(x)&q(x)}]g(x)>0)"},
  };
  std::vector<AxiomEntry> r;
  for (const auto& [name, text] : kTable) r.push_back({name, parse_formula(text)});
  return r;
}

}  // namespace

namespace kernel {

Provable start_proof(const Sequent& goal) { return KernelAccess::make(goal, {goal}); }

const std::vector<AxiomEntry>& axiom_table() {
  static const std::vector<AxiomEntry> table = build_axioms();
  return table;
}

Provable lookup_axiom(const std::string& name) {
  // "test" etc. name the same entries as the tactics testb etc.
  for (const auto& a : axiom_table())
    if (a.name == name || a.name == name + "b") return KernelAccess::make(Sequent({}, {a.formula}), {});
  fail("unknown axiom " + name);
}

Provable apply_rule(const Provable& p, std::size_t i, const Rule& r) { return splice(p, i, premises(subgoal(p, i), r)); }

Provable apply_subderivation(const Provable& p, std::size_t i, const Provable& sub) {
  const Sequent& g = subgoal(p, i);
  if (sub.conclusion() != g)
    fail("subderivation concludes " + print(sub.conclusion()) + " but subgoal is " + print(g));
  return splice(p, i, sub.subgoals(), sub.oracles());
}

Provable usubst_provable(const Provable& p, const USubst& sigma) {
  if (sigma.empty()) return p;
  if (!p.closed()) {
    // only proved Provables may receive replacements with free variables
    VarSet fv;
    for (const auto& pair : sigma.pairs()) fv |= free_vars(pair.repl);
    if (!fv.empty())
      fail("uniform substitution " + sigma.str() + " has free variables " + fv.str() + " and the Provable is not closed");
  }
  Sequent c = usubst_sequent(sigma, p.conclusion());
  std::vector<Sequent> subs;
  for (const auto& s : p.subgoals()) subs.push_back(usubst_sequent(sigma, s));
  return KernelAccess::make(std::move(c), std::move(subs), p.oracles());
}

Variable fresh_variable(const Provable& p, const Variable& x) {
  std::set<Variable> used = all_vars(p.conclusion());
  for (const auto& s : p.subgoals()) {
    auto v = all_vars(s);
    used.insert(v.begin(), v.end());
  }
  for (unsigned k = 0;; ++k) {
    Variable y(x.name, k);
    if (!used.count(y) && !used.count(y.prime())) return y;
  }
}

Provable uniform_rename(const Provable& p, const Variable& x, const Variable& y) {
  Variable bx = x.base();
  Variable by = y.base();
  if (bx == by) return p;
  auto check = [&](const Sequent& s) {
    auto v = all_vars(s);
    if (v.count(by) || v.count(by.prime())) fail("uniform rename: " + by.str() + " is not fresh");
    if (has_dependent_symbols(s)) fail("uniform rename: sequent mentions program constants or wild symbols");
  };
  check(p.conclusion());
  for (const auto& s : p.subgoals()) check(s);
  std::vector<Sequent> subs;
  for (const auto& s : p.subgoals()) subs.push_back(rename_var(s, bx, by));
  return KernelAccess::make(rename_var(p.conclusion(), bx, by), std::move(subs), p.oracles());
}

Provable rewrite_equiv(const Provable& p, std::size_t i, Position pos, const std::vector<std::size_t>& path,
                       const Provable& fact) {
  if (!fact.closed() || !fact.conclusion().ante.empty() || fact.conclusion().succ.size() != 1 ||
      fact.conclusion().succ[0].op() != Op::Equiv)
    fail("rewrite needs a closed fact ==> A<->B");
  const Expr& eq = fact.conclusion().succ[0];
  const Sequent& g = subgoal(p, i);
  Sequent n = g;
  auto& fs = formulas(n, pos.side);
  if (pos.index >= fs.size()) fail("rewrite: position out of range");
  fs[pos.index] = replace_at(fs[pos.index], path, 0, eq.child(0), eq.child(1));
  return splice(p, i, {n}, fact.oracles());
}

Provable assign_forward(const Provable& p, std::size_t i, std::size_t succ_pos) {
  const Sequent& g = subgoal(p, i);
  const Expr& f = expect(at(g.succ, succ_pos, "succedent"), Op::Box, "assignb");
  if (f.child(0).op() != Op::Assign) fail("assignb does not apply to " + print(f));
  const Variable& x = f.child(0).var();
  const Expr& e = f.child(0).child(0);
  const Expr& post = f.child(1);

  Sequent others = g;
  others.succ.erase(others.succ.begin() + static_cast<std::ptrdiff_t>(succ_pos));
  bool elsewhere = free_vars(others).contains(x);
  bool in_e = free_vars(e).contains(x);

  auto substitution_form = [&]() -> std::optional<Provable> {
    try {
      Provable ax = lookup_axiom("assignb");
      Variable ax_x("x");
      if (x != ax_x) ax = uniform_rename(ax, ax_x, x);
      USubst sigma;
      sigma.add(mk::function_symbol("f", 0), e);
      sigma.add(mk::predicate_symbol("p", 1), abstract_variable(post, x, 0));
      Provable inst = usubst_provable(ax, sigma);
      if (inst.conclusion().succ[0].child(0) != f) return std::nullopt;
      return rewrite_equiv(p, i, Position{Side::Succ, succ_pos}, {}, inst);
    } catch (const ClashError&) {
      return std::nullopt;
    } catch (const USubstError&) {
      return std::nullopt;
    }
  };

  if (!elsewhere || in_e) {
    if (auto r = substitution_form()) return *r;
  }
  if (has_dependent_symbols(g)) fail("assignb: cannot rename around program constants or wild symbols");
  Variable x0 = fresh_variable(p, x);
  Sequent n;
  for (const auto& a : g.ante) n.ante.push_back(rename_var(a, x, x0));
  n.ante.push_back(mk::eq(mk::var(x), rename_var(e, x, x0)));
  for (std::size_t k = 0; k < g.succ.size(); ++k) n.succ.push_back(k == succ_pos ? post : rename_var(g.succ[k], x, x0));
  return splice(p, i, {n});
}

Provable admit_arithmetic(const Sequent& goal, const OracleVerdict& certificate) {
  if (!certificate.valid())
    fail("arithmetic oracle verdict is " + std::string(status_text(certificate.status())) + " for " + print(goal));
  if (certificate.goal() != goal) fail("arithmetic certificate is for a different sequent");
  return KernelAccess::make(goal, {}, {certificate.oracle_name()});
}

bool is_closed(const Provable& p) { return p.closed(); }

Expr lie_derivative(const Expr& ode, const Expr& t) {
  if (ode.op() != Op::Ode) fail("lie_derivative needs a differential equation");
  return lie(ode, t);
}

}  // namespace kernel

}  // namespace usp
