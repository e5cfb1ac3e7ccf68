#include "support/suites.hpp"

#include <sstream>

#include "support/lp.hpp"
#include "support/semantics.hpp"
#include "usp/arith.hpp"
#include "usp/parser.hpp"
#include "usp/printer.hpp"
#include "usp/static_semantics.hpp"

namespace usp::testing {

void Tally::fail(std::string why) {
  ++failed;
  if (failures.size() < 5) failures.push_back(std::move(why));
}

std::string Tally::summary() const {
  std::ostringstream out;
  out << checked << " checked, " << failed << " failed";
  for (const auto& f : failures) out << "\n  " << f;
  return out.str();
}

namespace {

const std::vector<Variable> kXY{Variable("x"), Variable("y")};
const std::vector<Rational> kVals{Rational(-1), Rational(0), Rational(1, 2), Rational(2)};

Expr wp(const char* n) { return mk::pred(mk::wild_predicate(n), {}); }

Expr random_replacement(Gen& g, const Symbol& s) {
  switch (s.kind) {
    case SymbolKind::Program: return g.discrete_program(2);
    case SymbolKind::Function: return s.arity == 0 ? g.polynomial(1) : abstract_variable(g.polynomial(2), Variable("x"), 0);
    case SymbolKind::Predicate:
      if (s.space == Space::Wild || s.arity == 0) return g.arith_formula(1);
      return abstract_variable(g.arith_formula(1), Variable("x"), 0);
  }
  return {};
}

// Binders around a hole H; each captures x.
const char* kBinders[] = {
    "\\forall x H", "\\exists x H", "[x:=1;]H", "<x:=1;>H", "[{x'=1}]H", "[{x:=x+1;}*]H", "[y:=1; ++ x:=2;]H",
    "[?y>0;x:=0;]H", "[{x'=y, y'=1}]H",
};

}  // namespace

USubst random_subst(Gen& g, bool free_vars_ok) {
  USubst s;
  auto term_over = [&](bool dot) {
    Expr t = g.term(2);
    if (dot) t = abstract_variable(t, Variable("x"), 0);
    if (!free_vars_ok) {
      VarSet fv = free_vars(t);
      for (const auto& v : fv.elements()) t = abstract_variable(t, v, 0);
      if (!dot && dot_count(t) > 0) t = mk::num(g.uniform(0, 3));
    }
    return t;
  };
  if (g.coin()) s.add(mk::function_symbol("f", 1), term_over(true));
  if (g.coin()) s.add(mk::function_symbol("c", 0), term_over(false));
  if (g.coin()) {
    Expr f = mk::cmp(CmpOp::Ge, term_over(true), mk::num(g.uniform(-1, 1)));
    s.add(mk::predicate_symbol("p", 1), f);
  }
  if (g.coin()) {
    Expr q = free_vars_ok ? mk::gt(mk::var(g.variable()), mk::num(0)) : (g.coin() ? mk::tru() : mk::fls());
    s.add(mk::wild_predicate("q"), q);
  }
  if (g.coin()) s.add(mk::program_symbol("a"), free_vars_ok ? mk::assign(g.variable(), mk::num(1)) : mk::test(mk::tru()));
  return s;
}

Provable random_provable(Gen& g) {
  if (g.coin(0.4)) {
    Expr f = g.formula(2);
    return kernel::apply_rule(kernel::start_proof(Sequent({f}, {f})), 0, Rule::close(0, 0));
  }
  Provable p = kernel::start_proof(Sequent({g.formula(2)}, {mk::imply(g.formula(2), g.formula(2))}));
  p = kernel::apply_rule(p, 0, Rule::implyR(0));
  if (g.coin()) p = kernel::apply_rule(p, 0, Rule::cut(g.formula(2)));
  return p;
}

Tally uniform_effect(std::uint64_t seed, std::size_t want) {
  Gen g(seed);
  Tally t;
  for (std::size_t i = 0; i < 6 * want && t.checked < want; ++i) {
    Provable p = random_provable(g);
    USubst s = random_subst(g, p.closed());
    try {
      Provable q = kernel::usubst_provable(p, s);
      ++t.checked;
      bool ok = q.conclusion() == usubst_sequent(s, p.conclusion()) && q.subgoals().size() == p.subgoals().size();
      for (std::size_t k = 0; ok && k < p.subgoals().size(); ++k) ok = q.subgoals()[k] == usubst_sequent(s, p.subgoals()[k]);
      if (!ok) t.fail(s.str() + " on " + p.str() + " gave " + q.str());
    } catch (const ClashError&) {
      bool any = false;
      try {
        usubst_sequent(s, p.conclusion());
        for (const auto& sg : p.subgoals()) usubst_sequent(s, sg);
      } catch (const ClashError&) {
        any = true;
      }
      if (!any) t.fail("Provable clash without a sequent clash: " + s.str() + " on " + p.str());
    }
  }
  return t;
}

Tally clash_corpus() {
  struct Form {
    Expr occurrence;
    Symbol sym;
    Expr capturing;  // mentions x
    Expr benign;     // over z only
  };
  std::vector<Form> forms{
      {wp("p"), mk::wild_predicate("p"), parse_formula("x>0"), parse_formula("z>0")},
      {mk::pred(mk::predicate_symbol("r", 1), {mk::var("y")}), mk::predicate_symbol("r", 1),
       mk::gt(mk::dot(0), mk::var("x")), mk::gt(mk::dot(0), mk::var("z"))},
      {mk::gt(mk::func(mk::function_symbol("c", 0), {}), mk::num(0)), mk::function_symbol("c", 0), mk::var("x"),
       mk::var("z")},
      {mk::gt(mk::func(mk::function_symbol("f", 1), {mk::num(1)}), mk::num(0)), mk::function_symbol("f", 1),
       mk::plus(mk::dot(0), mk::var("x")), mk::plus(mk::dot(0), mk::var("z"))},
  };
  Tally t;
  for (const char* b : kBinders) {
    for (const auto& f : forms) {
      std::string ctx = b;
      ctx.replace(ctx.find('H'), 1, print(f.occurrence));
      Expr e = parse_formula(ctx);
      USubst bad;
      bad.add(f.sym, f.capturing);
      try {
        Expr r = usubst_expr(bad, e);
        t.fail("no clash for " + f.sym.str() + " in " + print(e) + ", gave " + print(r));
      } catch (const ClashError& err) {
        ++t.checked;
        if (!(err.symbol() == f.sym) || !err.offending().contains(Variable("x")) || !err.taboo().contains(Variable("x")))
          t.fail(std::string("wrong clash details: ") + err.what());
      }
      USubst ok;
      ok.add(f.sym, f.benign);
      try {
        usubst_expr(ok, e);
      } catch (const ClashError& err) {
        t.fail(std::string("benign replacement clashed: ") + err.what());
      }
    }
  }
  // Outside any binder the same replacements are admissible.
  for (const auto& f : forms) {
    USubst s;
    s.add(f.sym, f.capturing);
    try {
      usubst_expr(s, f.occurrence);
    } catch (const ClashError& err) {
      t.fail(std::string("unbound occurrence clashed: ") + err.what());
    }
  }
  return t;
}

Tally axiom_sweep(std::uint64_t seed, int per_axiom) {
  GenConfig cfg;
  cfg.vars = kXY;
  cfg.symbols = false;
  cfg.odes = false;
  cfg.quantifiers = false;
  Gen g(seed, cfg);
  Tally t;
  for (const char* name : {"testb", "choiceb", "composeb", "assignb", "iterateb", "K", "boxTrue", "diamond"}) {
    Provable ax = kernel::lookup_axiom(name);
    for (int i = 0; i < per_axiom; ++i) {
      USubst s;
      for (const auto& sym : signature(ax.conclusion())) s.add(sym, random_replacement(g, sym));
      Provable inst = ax;
      try {
        inst = kernel::usubst_provable(ax, s);
      } catch (const ClashError&) {
        continue;
      }
      if (!inst.closed()) t.fail(std::string(name) + " instance is not closed");
      for_each_state(kXY, kVals, [&](const State& st) {
        auto v = holds(inst.conclusion(), st);
        if (!v) return true;
        ++t.checked;
        if (!*v) {
          t.fail(std::string(name) + ": " + print(inst.conclusion()) + " fails at x=" + to_string(value_of(st, kXY[0])) +
                 ", y=" + to_string(value_of(st, kXY[1])));
          return false;
        }
        return true;
      });
    }
  }
  return t;
}

Tally ground_corpus() {
  std::vector<Rational> vals = grid(2, 4);
  static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Ge, CmpOp::Gt, CmpOp::Le, CmpOp::Lt};
  Tally t;
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = 0; j < vals.size(); j += 2)
      for (CmpOp op : ops) {
        Expr a = mk::num(vals[i]), b = mk::num(vals[j]);
        std::vector<Sequent> forms{
            Sequent({}, {mk::cmp(op, a, b)}),
            Sequent({mk::cmp(op, b, a)}, {mk::cmp(op, mk::divide(a, b), mk::times(a, b))}),
        };
        for (const auto& s : forms) {
          ++t.checked;
          bool truth = *holds(s, State{});
          OracleVerdict gv = decide_ground(s);
          if (gv.valid() != truth || gv.status() == VerdictStatus::Unknown) t.fail("ground on " + print(s));
          for (const auto& v : {decide_linear(s), decide_heuristic(s), qe(s)}) {
            if ((v.valid() && !truth) || (v.status() == VerdictStatus::NotValid && truth))
              t.fail(v.oracle_name() + " on " + print(s));
          }
        }
      }
  return t;
}

Tally vertex_agreement(std::uint64_t seed, int n) {
  Gen g(seed);
  Tally t;
  static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Ne, CmpOp::Ge, CmpOp::Gt, CmpOp::Le, CmpOp::Lt};
  for (int i = 0; i < n; ++i) {
    std::size_t dim = static_cast<std::size_t>(g.uniform(1, 3));
    std::vector<Variable> vars{Variable("x"), Variable("y"), Variable("z")};
    vars.resize(dim);
    auto atom = [&] {
      LinAtom a;
      for (std::size_t k = 0; k < dim; ++k) a.coef.push_back(g.uniform(-2, 2));
      a.op = ops[g.coin(0.8) ? g.uniform(2, 5) : g.uniform(0, 1)];
      a.rhs = g.uniform(-3, 3);
      return a;
    };
    std::size_t total = static_cast<std::size_t>(g.uniform(1, 6));
    std::size_t in_succ = static_cast<std::size_t>(g.uniform(0, std::min<int>(2, static_cast<int>(total) - 1)));
    std::vector<LinAtom> ante, succ;
    for (std::size_t k = 0; k < total; ++k) (k < in_succ ? succ : ante).push_back(atom());
    Sequent s;
    for (const auto& a : ante) s.ante.push_back(to_expr(a, vars));
    for (const auto& a : succ) s.succ.push_back(to_expr(a, vars));
    ++t.checked;
    bool want = valid(ante, succ, dim);
    OracleVerdict v = decide_linear(s);
    if (v.status() == VerdictStatus::Unknown || v.valid() != want)
      t.fail(print(s) + (want ? " is valid" : " is not valid"));
    else if (v.status() == VerdictStatus::NotValid && holds(s, v.counterexample()) != std::optional<bool>(false))
      t.fail("bad counterexample for " + print(s));
  }
  return t;
}

Tally roundtrip_generated(std::uint64_t seed, int n) {
  Gen g(seed);
  Tally t;
  for (int i = 0; i < n; ++i) {
    Expr e = i % 3 == 0 ? g.term() : i % 3 == 1 ? g.formula() : g.program();
    std::string text = print(e);
    ++t.checked;
    try {
      Expr back = parse_expr(text, e.category());
      if (back != e) t.fail(text + " reparsed as " + print(back));
    } catch (const ParseError& err) {
      t.fail(text + ": " + err.what());
    }
  }
  return t;
}

}  // namespace usp::testing
