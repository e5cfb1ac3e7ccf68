#include "usp/prover.hpp"

#include <algorithm>
#include <set>

#include "usp/lemma_store.hpp"
#include "usp/poly.hpp"
#include "usp/printer.hpp"

namespace usp {

namespace {

using Pred = std::function<bool(const Expr&)>;

[[noreturn]] void fail(ProofErrorKind k, const std::string& msg) { throw ProofError(k, msg); }

ProofError clash_error(const ClashError& e, const std::string& context) {
  ProofError err(ProofErrorKind::Clash, context + e.what());
  err.clash_symbol = e.symbol();
  err.clash_taboo = e.taboo();
  err.clash_offending = e.offending();
  return err;
}

// Runs a kernel computation and maps its exceptions to ProofErrors.
template <typename F>
auto guarded(F&& f, const std::string& what) -> decltype(f()) {
  try {
    return f();
  } catch (const ProofError&) {
    throw;
  } catch (const ClashError& e) {
    throw clash_error(e, what + ": ");
  } catch (const KernelError& e) {
    throw ProofError(ProofErrorKind::NotApplicable, what + ": " + e.what());
  } catch (const USubstError& e) {
    throw ProofError(ProofErrorKind::Kernel, what + ": " + e.what());
  } catch (const ExprError& e) {
    throw ProofError(ProofErrorKind::Kernel, what + ": " + e.what());
  } catch (const ArithError& e) {
    throw ProofError(ProofErrorKind::Arithmetic, what + ": " + e.what());
  }
}

Expr subst(const USubst& s, const Expr& e) { return s.empty() || !e.valid() ? e : usubst_expr(s, e); }

USubst restrict_to(const USubst& sigma, const std::set<Symbol>& sig) {
  USubst out;
  for (const auto& p : sigma.pairs())
    for (const auto& s : sig)
      if (same_head(s, p.what)) {
        out.add(p.what, p.repl);
        break;
      }
  return out;
}

std::set<Symbol> provable_signature(const Provable& p) {
  std::set<Symbol> sig = signature(p.conclusion());
  for (const auto& g : p.subgoals()) {
    auto more = signature(g);
    sig.insert(more.begin(), more.end());
  }
  return sig;
}

bool mentions(const Sequent& s, const std::string& name) {
  for (const auto& t : signature(s))
    if (t.name == name) return true;
  return false;
}

Provable start(const Sequent& g) { return kernel::start_proof(g); }

Provable rule(const Sequent& g, const Rule& r) { return kernel::apply_rule(start(g), 0, r); }

// Polynomial view of a term for cofactor guessing; nullopt when not polynomial.
std::optional<Poly> to_poly(const Expr& t, AtomTable& atoms) {
  switch (t.op()) {
    case Op::Num: return Poly::constant(t.num());
    case Op::Var: return Poly::atom(atoms.intern(t));
    case Op::Neg: {
      auto a = to_poly(t.child(0), atoms);
      if (!a) return std::nullopt;
      return -*a;
    }
    case Op::Plus:
    case Op::Minus:
    case Op::Times: {
      auto a = to_poly(t.child(0), atoms);
      auto b = to_poly(t.child(1), atoms);
      if (!a || !b) return std::nullopt;
      if (t.op() == Op::Plus) return *a + *b;
      if (t.op() == Op::Minus) return *a - *b;
      return *a * *b;
    }
    case Op::Power: {
      auto a = to_poly(t.child(0), atoms);
      if (!a || t.child(1).op() != Op::Num) return std::nullopt;
      const Rational& n = t.child(1).num();
      if (denominator_of(n) != 1 || n < 0 || n > 64) return std::nullopt;
      return a->pow(static_cast<unsigned>(numerator_of(n)));
    }
    default: return std::nullopt;
  }
}

Expr rational_term(const Rational& r) { return r < 0 ? mk::neg(mk::num(-r)) : mk::num(r); }

// Constant cofactors worth trying for a Darboux argument on post e >= 0.
std::vector<Expr> cofactor_candidates(const Expr& ode, const Expr& post) {
  std::vector<Rational> cs;
  try {
    Expr lhs = post.child(0);
    Expr rhs = post.child(1);
    if (post.cmp() == CmpOp::Le || post.cmp() == CmpOp::Lt) std::swap(lhs, rhs);
    Expr e = mk::minus(lhs, rhs);
    AtomTable atoms;
    auto pe = to_poly(e, atoms);
    auto pl = to_poly(kernel::lie_derivative(ode, e), atoms);
    if (pe && pl && !pe->is_zero()) {
      const auto& [m, c] = *pe->terms().rbegin();
      auto it = pl->terms().find(m);
      if (it != pl->terms().end()) cs.push_back(it->second / c);
    }
  } catch (const std::exception&) {
  }
  for (long k : {0L, -1L, 1L})
    if (std::find(cs.begin(), cs.end(), Rational(k)) == cs.end()) cs.push_back(Rational(k));
  std::vector<Expr> out;
  for (const auto& c : cs) out.push_back(rational_term(c));
  return out;
}

}  // namespace

class Interpreter {
 public:
  Interpreter(Prover& pv, ProofTree& tree, std::vector<Expr> hidden = {})
      : pv_(pv), tree_(tree), hidden_(std::move(hidden)) {}

  std::vector<NodeId> run(NodeId at, const Tactic& t) {
    try {
      return dispatch(at, t);
    } catch (ProofError& e) {
      e.set_node(at);
      throw;
    }
  }

  NodeId expand(NodeId at, const std::string& name) {
    require_open(at);
    const Definition* d = pv_.state_.defs.find(name);
    if (!d) fail(ProofErrorKind::NotFound, "unknown symbol " + name);
    if (!d->body) fail(ProofErrorKind::Definition, "symbol " + name + " has no definition");
    if (!mentions(goal(at), name)) return at;
    SubstPair p = pv_.state_.defs.pair(name);
    USubst s;
    s.add(p.what, p.repl);
    return subst_step(at, {p}, s);
  }

  NodeId expand_all(NodeId at) {
    require_open(at);
    std::vector<SubstPair> pairs;
    for (const auto& n : pv_.state_.defs.reachable(signature(goal(at)))) pairs.push_back(pv_.state_.defs.pair(n));
    if (pairs.empty()) return at;
    USubst s;
    try {
      s = close_substitution(pairs);
    } catch (const DefinitionError& e) {
      fail(ProofErrorKind::Definition, e.what());
    }
    return subst_step(at, pairs, s);
  }

  std::vector<NodeId> use_lemma(NodeId at, const std::string& name, const TacticPtr& adapt) {
    require_open(at);
    if (!pv_.lemmas_) fail(ProofErrorKind::NotFound, "no lemma store configured");
    std::optional<LemmaRecord> rec = pv_.lemmas_->get(name);
    if (!rec) fail(ProofErrorKind::NotFound, "unknown lemma \"" + name + "\"");
    Provable lemma = rec->provable;

    std::vector<std::pair<std::string, std::string>> us_pairs;
    TacticPtr rest = adapt ? split_us(adapt, us_pairs) : nullptr;
    NodeId node = at;
    if (!us_pairs.empty()) {
      SymbolTable table = symbols(goal(at));
      for (const auto& [n, s] : rec->entry.symbols()) table.emplace(n, s);
      for (const auto& s : provable_signature(lemma)) table.emplace(s.name, s);
      USubst all = parse_substitution(us_pairs, table);
      std::set<Symbol> lsig = signature(lemma.conclusion());
      std::set<Symbol> gsig = signature(goal(at));
      USubst on_lemma;
      std::vector<SubstPair> on_goal;
      for (const auto& p : all.pairs()) {
        bool in_lemma = false;
        bool in_goal = false;
        for (const auto& s : lsig) in_lemma = in_lemma || same_head(s, p.what);
        for (const auto& s : gsig) in_goal = in_goal || same_head(s, p.what);
        if (in_lemma) on_lemma.add(p.what, p.repl);
        if (in_goal || !in_lemma) on_goal.push_back(p);
      }
      if (!on_lemma.empty())
        lemma = guarded([&] { return kernel::usubst_provable(lemma, on_lemma); }, "instantiating lemma " + name);
      if (!on_goal.empty()) {
        USubst g;
        for (const auto& p : on_goal) g.add(p.what, p.repl);
        node = subst_step(node, on_goal, g);
      }
    }

    if (!rest) return splice_lemma(node, lemma, name);

    const Sequent& lc = lemma.conclusion();
    if (!lc.ante.empty() || lc.succ.size() != 1)
      fail(ProofErrorKind::Lemma, "lemma \"" + name + "\" does not conclude a single formula");
    Provable inst = lemma;
    StepFn fn = [inst](const Sequent& g, const USubst& sigma) {
      Provable li = inst;
      USubst local = restrict_to(sigma, provable_signature(inst));
      if (!local.empty()) li = kernel::usubst_provable(inst, local);
      Expr c = li.conclusion().succ[0];
      Provable p = rule(g, Rule::cut(c));
      for (std::size_t k = 0; k < g.ante.size(); ++k) p = kernel::apply_rule(p, 1, Rule::hideL(0));
      for (std::size_t k = 0; k < g.succ.size(); ++k) p = kernel::apply_rule(p, 1, Rule::hideR(0));
      return kernel::apply_subderivation(p, 1, li);
    };
    std::vector<NodeId> kids = step(node, fn, "useLemma");
    std::vector<NodeId> out;
    {
      Quiet q(*this);
      out = run(kids[0], *rest);
    }
    out.insert(out.end(), kids.begin() + 1, kids.end());
    return out;
  }

  std::vector<NodeId> using_block(NodeId at, const Tactic& inner, const std::vector<Expr>& keep) {
    require_open(at);
    const Sequent& g = goal(at);
    for (const auto& k : keep) {
      bool found = false;
      for (const auto& f : g.ante) found = found || same(f, k);
      for (const auto& f : g.succ) found = found || same(f, k);
      if (!found) fail(ProofErrorKind::Locator, "using: " + print(k) + " is not in the goal");
    }
    std::set<std::string> taken;
    for (const auto& s : signature(g)) taken.insert(s.name);
    USubst hide;
    std::vector<std::pair<Expr, Expr>> abstracted;  // hidden formula -> predicate application
    std::vector<Expr> hidden;
    auto conceal = [&](const Expr& f) -> Expr {
      for (const auto& k : keep)
        if (same(f, k)) return f;
      for (const auto& [orig, app] : abstracted)
        if (orig == f) return app;
      VarSet fv = free_vars(f);
      if (fv.is_all())
        fail(ProofErrorKind::NotApplicable, "using: cannot hide " + print(f) + ", it depends on all variables");
      std::vector<Variable> vars(fv.elements().begin(), fv.elements().end());
      std::string name;
      for (unsigned k = 0;; ++k) {
        name = "hidden__" + std::to_string(k);
        if (!taken.count(name)) break;
      }
      taken.insert(name);
      Symbol s = mk::predicate_symbol(name, static_cast<unsigned>(vars.size()));
      Expr repl = f;
      std::vector<Expr> args;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        repl = abstract_variable(repl, vars[k], static_cast<unsigned>(k));
        args.push_back(mk::var(vars[k]));
      }
      Expr app = mk::pred(s, args);
      USubst one;
      one.add(s, repl);
      if (guarded([&] { return usubst_expr(one, app); }, "using") != f)
        fail(ProofErrorKind::NotApplicable, "using: cannot abstract " + print(f));
      hide.add(s, repl);
      abstracted.emplace_back(f, app);
      hidden.push_back(f);
      return app;
    };
    Sequent h;
    for (const auto& f : g.ante) h.ante.push_back(conceal(f));
    for (const auto& f : g.succ) h.succ.push_back(conceal(f));

    auto sub = std::make_shared<ProofTree>(h);
    Interpreter in(pv_, *sub, hidden);
    in.quiet_ = 1;
    std::vector<NodeId> leaves = in.run(sub->root(), inner);
    std::vector<Sequent> goals;
    std::vector<std::string> labels;
    for (NodeId l : leaves) {
      goals.push_back(guarded([&] { return usubst_sequent(hide, sub->node(l).goal); }, "using"));
      labels.push_back(sub->node(l).label);
    }
    StepRecord r;
    r.kind = StepKind::Using;
    r.inner = sub;
    r.hidden = hide;
    return tree_.attach(at, std::move(r), goals, labels);
  }

 private:
  struct Quiet {
    explicit Quiet(Interpreter& i) : in(i) { ++in.quiet_; }
    ~Quiet() { --in.quiet_; }
    Interpreter& in;
  };

  const Sequent& goal(NodeId n) const { return tree_.node(n).goal; }

  void require_open(NodeId n) const {
    if (!tree_.node(n).open()) throw ProofError(ProofErrorKind::NotOpen, "goal " + std::to_string(n) + " is not open", n);
  }

  SymbolTable symbols(const Sequent& g) const {
    SymbolTable t = pv_.state_.defs.symbols();
    for (const auto& s : signature(g)) t.emplace(s.name, s);
    return t;
  }

  Expr parse_arg(NodeId at, const Tactic& a, std::size_t k, Category cat) const {
    if (k >= a.inputs.size()) fail(ProofErrorKind::Syntax, a.name + " needs an argument");
    try {
      return parse_expr(a.inputs[k], cat, symbols(goal(at)));
    } catch (const ParseError& e) {
      fail(ProofErrorKind::Syntax, a.name + ": " + e.what());
    }
  }

  // Syntactic equality, else equality after expanding all definitions.
  bool same(const Expr& a, const Expr& b) const {
    if (a == b) return true;
    const auto& defs = pv_.state_.defs;
    try {
      return defs.expand_all(a) == defs.expand_all(b);
    } catch (const std::exception&) {
      return false;
    }
  }

  void mark(NodeId at, const Tactic& t) {
    if (quiet_ == 0) tree_.set_text(at, print(t));
  }

  std::vector<NodeId> step(NodeId at, const StepFn& fn, const std::string& what,
                           std::vector<std::string> labels = {}) {
    require_open(at);
    Provable p = guarded([&] { return fn(goal(at), USubst{}); }, what);
    StepRecord r;
    r.kind = StepKind::Rule;
    r.provable = p;
    r.redo = fn;
    return tree_.attach(at, std::move(r), p.subgoals(), labels);
  }

  NodeId subst_step(NodeId at, std::vector<SubstPair> pairs, const USubst& s) {
    Sequent g = guarded([&] { return usubst_sequent(s, goal(at)); }, "substitution");
    StepRecord r;
    r.kind = StepKind::Subst;
    r.subst = std::move(pairs);
    return tree_.attach(at, std::move(r), {g}, {tree_.node(at).label})[0];
  }

  // Applies a lemma whose conclusion is the goal itself, up to matching and definitions.
  std::vector<NodeId> splice_lemma(NodeId at, const Provable& lemma, const std::string& name) {
    auto attempt = [&](NodeId n) -> std::optional<Provable> {
      if (lemma.conclusion() == goal(n)) return lemma;
      try {
        USubst m = match(lemma.conclusion(), goal(n));
        return kernel::usubst_provable(lemma, m);
      } catch (const std::exception&) {
        return std::nullopt;
      }
    };
    NodeId n = at;
    std::optional<Provable> fit = attempt(n);
    if (!fit) {
      std::vector<SubstPair> pairs;
      for (const auto& s : pv_.state_.defs.reachable(signature(goal(n)))) pairs.push_back(pv_.state_.defs.pair(s));
      if (!pairs.empty()) {
        ProofTree saved = tree_;
        n = subst_step(n, pairs, close_substitution(pairs));
        fit = attempt(n);
        if (!fit) tree_ = saved;
      }
    }
    if (!fit) fail(ProofErrorKind::Lemma, "lemma \"" + name + "\" concludes " + lemma.conclusion().str() +
                                              ", which does not fit " + goal(at).str());
    Provable inst = *fit;
    StepFn fn = [inst](const Sequent& g, const USubst& sigma) {
      USubst local = restrict_to(sigma, provable_signature(inst));
      Provable p = local.empty() ? inst : kernel::usubst_provable(inst, local);
      if (p.conclusion() != g) throw KernelError("lemma instance does not conclude " + g.str());
      return p;
    };
    return step(n, fn, "useLemma");
  }

  static TacticPtr split_us(const TacticPtr& t, std::vector<std::pair<std::string, std::string>>& pairs) {
    if (t->kind == TacticKind::UsTactic) {
      pairs = t->pairs;
      return nullptr;
    }
    if (t->kind != TacticKind::Seq) return t;
    TacticPtr left = split_us(t->children[0], pairs);
    if (!left) return t->children[1];
    if (left == t->children[0]) return t;
    return Tactic::seq(left, t->children[1]);
  }

  std::vector<NodeId> dispatch(NodeId at, const Tactic& t) {
    switch (t.kind) {
      case TacticKind::Atom: {
        require_open(at);
        auto out = atom(at, t);
        mark(at, t);
        return out;
      }
      case TacticKind::Seq: {
        std::vector<NodeId> first = run(at, *t.children[0]);
        if (t.children[1]->kind == TacticKind::Branch) return branch(first, *t.children[1]);
        std::vector<NodeId> out;
        for (NodeId n : first) {
          auto more = run(n, *t.children[1]);
          out.insert(out.end(), more.begin(), more.end());
        }
        return out;
      }
      case TacticKind::Branch: return branch({at}, t);
      case TacticKind::Repeat: {
        std::vector<NodeId> out;
        std::size_t budget = 10000;
        repeat(at, *t.children[0], out, budget);
        return out;
      }
      case TacticKind::Using: {
        std::vector<Expr> keep;
        for (const auto& f : t.formulas) {
          try {
            keep.push_back(parse_formula(f, symbols(goal(at))));
          } catch (const ParseError& e) {
            fail(ProofErrorKind::Syntax, "using: " + std::string(e.what()));
          }
        }
        auto out = using_block(at, *t.children[0], keep);
        mark(at, t);
        return out;
      }
      case TacticKind::Skip: return {at};
      case TacticKind::ExpandDef: {
        NodeId n = expand(at, t.name);
        mark(at, t);
        return {n};
      }
      case TacticKind::ExpandAll: {
        NodeId n = expand_all(at);
        mark(at, t);
        return {n};
      }
      case TacticKind::UsTactic: {
        require_open(at);
        USubst s = parse_substitution(t.pairs, symbols(goal(at)));
        NodeId n = subst_step(at, s.pairs(), s);
        mark(at, t);
        return {n};
      }
      case TacticKind::UseLemma: {
        auto out = use_lemma(at, t.name, t.adaptation);
        mark(at, t);
        return out;
      }
    }
    fail(ProofErrorKind::UnknownTactic, "unknown tactic");
  }

  std::vector<NodeId> branch(const std::vector<NodeId>& opens, const Tactic& b) {
    std::size_t k = b.children.size();
    if (opens.size() != k)
      fail(ProofErrorKind::Branch,
           std::to_string(k) + " branches for " + std::to_string(opens.size()) + " open goals");
    std::vector<std::optional<std::size_t>> pick(k);
    std::vector<bool> used(opens.size(), false);
    for (std::size_t i = 0; i < k; ++i) {
      if (!b.labels[i]) continue;
      for (std::size_t j = 0; j < opens.size(); ++j) {
        if (!used[j] && tree_.node(opens[j]).label == *b.labels[i]) {
          pick[i] = j;
          used[j] = true;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (!b.labels[i] || pick[i]) continue;
      std::optional<Expr> f;
      try {
        f = parse_formula(*b.labels[i], symbols(goal(opens[0])));
      } catch (const ParseError&) {
      }
      for (std::size_t j = 0; f && j < opens.size() && !pick[i]; ++j) {
        if (used[j]) continue;
        const Sequent& g = goal(opens[j]);
        bool hit = false;
        for (const auto& x : g.succ) hit = hit || same(x, *f);
        for (const auto& x : g.ante) hit = hit || same(x, *f);
        if (hit) {
          pick[i] = j;
          used[j] = true;
        }
      }
      if (!pick[i]) fail(ProofErrorKind::Branch, "no open goal matches branch label \"" + *b.labels[i] + "\"");
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (pick[i]) continue;
      for (std::size_t j = 0; j < opens.size(); ++j) {
        if (!used[j]) {
          pick[i] = j;
          used[j] = true;
          break;
        }
      }
    }
    std::vector<std::vector<NodeId>> results(opens.size());
    for (std::size_t i = 0; i < k; ++i) results[*pick[i]] = run(opens[*pick[i]], *b.children[i]);
    std::vector<NodeId> out;
    for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
    return out;
  }

  void repeat(NodeId at, const Tactic& t, std::vector<NodeId>& out, std::size_t& budget) {
    if (budget == 0) {
      out.push_back(at);
      return;
    }
    --budget;
    ProofTree saved = tree_;
    std::vector<NodeId> next;
    try {
      next = run(at, t);
    } catch (const ProofError&) {
      tree_ = saved;
      out.push_back(at);
      return;
    }
    if (tree_.node(at).open()) {
      out.push_back(at);
      return;
    }
    for (NodeId n : next) repeat(n, t, out, budget);
  }

  // ---- positions ----

  std::optional<std::size_t> find_in(NodeId at, Side side, const std::optional<Expr>& shape, const Pred& ok) {
    const auto& fs = formulas(goal(at), side);
    if (shape) {
      for (std::size_t i = 0; i < fs.size(); ++i)
        if (fs[i] == *shape && ok(fs[i])) return i;
      std::optional<std::size_t> hit;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        if (!same(fs[i], *shape) || !ok(fs[i])) continue;
        if (hit && fs[*hit] != fs[i])
          fail(ProofErrorKind::Locator, "locator " + print(*shape) + " is ambiguous: it matches " + print(fs[*hit]) +
                                            " and " + print(fs[i]));
        if (!hit) hit = i;
      }
      return hit;
    }
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (ok(fs[i])) return i;
    return std::nullopt;
  }

  Position locate(NodeId at, const Tactic& a, const Pred& ok, bool succ_ok, bool ante_ok) {
    std::optional<Expr> shape;
    if (a.locator && a.locator->shape) {
      try {
        shape = parse_formula(*a.locator->shape, symbols(goal(at)));
      } catch (const ParseError& e) {
        fail(ProofErrorKind::Syntax, a.name + ": locator " + e.what());
      }
    }
    std::vector<Side> sides;
    if (a.locator) {
      Side s = a.locator->succ ? Side::Succ : Side::Ante;
      if ((s == Side::Succ && !succ_ok) || (s == Side::Ante && !ante_ok))
        fail(ProofErrorKind::Locator, a.name + " does not apply in the " +
                                          std::string(s == Side::Succ ? "succedent" : "antecedent"));
      if (a.locator->index) {
        std::size_t i = *a.locator->index;
        const auto& fs = s == Side::Succ ? goal(at).succ : goal(at).ante;
        if (i >= fs.size() || !ok(fs[i]) || (shape && !same(fs[i], *shape)))
          fail(ProofErrorKind::Locator, a.name + ": position " + std::string(s == Side::Succ ? "" : "-") +
                                            std::to_string(i + 1) + " is not applicable in " + goal(at).str());
        return Position{s, i};
      }
      sides.push_back(s);
    } else {
      if (succ_ok) sides.push_back(Side::Succ);
      if (ante_ok) sides.push_back(Side::Ante);
    }
    for (Side s : sides)
      if (auto i = find_in(at, s, shape, ok)) return Position{s, *i};
    if (shape)
      for (const auto& h : hidden_)
        if (same(h, *shape)) fail(ProofErrorKind::Hidden, a.name + ": " + print(*shape) + " is hidden by using");
    fail(ProofErrorKind::Locator, a.name + ": no applicable formula" + (shape ? " matching " + print(*shape) : "") +
                                      " in " + goal(at).str());
  }

  static Pred op_is(Op op) {
    return [op](const Expr& f) { return f.op() == op; };
  }
  static Pred box_of(Op prog) {
    return [prog](const Expr& f) { return f.op() == Op::Box && f.child(0).op() == prog; };
  }

  // ---- steps ----

  std::vector<NodeId> simple_rule(NodeId at, const Tactic& a, RuleKind k, Op op, bool succ) {
    Position p = locate(at, a, op_is(op), succ, !succ);
    Rule r{k, p.index, 0, {}};
    return step(at, [r](const Sequent& g, const USubst&) { return rule(g, r); }, a.name);
  }

  static Provable box_rewrite(const Sequent& g, Position pos, const std::string& axiom) {
    const Expr& f = formulas(g, pos.side).at(pos.index);
    const Expr& prog = f.child(0);
    USubst s;
    Symbol p = mk::wild_predicate("p");
    if (axiom == "testb") {
      s.add(mk::wild_predicate("q"), prog.child(0));
    } else if (axiom == "iterateb") {
      s.add(mk::program_symbol("a"), prog.child(0));
    } else {
      s.add(mk::program_symbol("a"), prog.child(0));
      s.add(mk::program_symbol("b"), prog.child(1));
    }
    s.add(p, f.child(1));
    Provable inst = kernel::usubst_provable(kernel::lookup_axiom(axiom), s);
    return kernel::rewrite_equiv(start(g), 0, pos, {}, inst);
  }

  // [x:=e]P in the antecedent, by the substitution form of the assignment axiom.
  static Provable assign_left(const Sequent& g, std::size_t idx) {
    const Expr& f = g.ante.at(idx);
    if (f.op() != Op::Box || f.child(0).op() != Op::Assign) throw KernelError("assignb needs [x:=e]P");
    const Variable& x = f.child(0).var();
    Provable ax = kernel::lookup_axiom("assignb");
    Variable ax_x("x");
    if (x != ax_x) ax = kernel::uniform_rename(ax, ax_x, x);
    USubst s;
    s.add(mk::function_symbol("f", 0), f.child(0).child(0));
    s.add(mk::predicate_symbol("p", 1), abstract_variable(f.child(1), x, 0));
    Provable inst = kernel::usubst_provable(ax, s);
    if (inst.conclusion().succ[0].child(0) != f) throw KernelError("assignb: instance does not match");
    return kernel::rewrite_equiv(start(g), 0, Position{Side::Ante, idx}, {}, inst);
  }

  std::vector<NodeId> box_step(NodeId at, const Tactic& a, const std::string& axiom, Op prog) {
    Position p = locate(at, a, box_of(prog), true, true);
    return step(at, [p, axiom](const Sequent& g, const USubst&) { return box_rewrite(g, p, axiom); }, a.name);
  }

  std::vector<NodeId> assign_step(NodeId at, Position p, const std::string& what) {
    if (p.side == Side::Succ)
      return step(at, [i = p.index](const Sequent& g, const USubst&) { return kernel::assign_forward(start(g), 0, i); },
                  what);
    return step(at, [i = p.index](const Sequent& g, const USubst&) { return assign_left(g, i); }, what);
  }

  std::vector<NodeId> qe_step(NodeId at, const std::string& what) {
    std::shared_ptr<ArithOracle> o = pv_.oracle_;
    StepFn fn = [o](const Sequent& g, const USubst&) {
      OracleVerdict v = o->qe(g);
      if (!v.valid()) {
        std::string msg = "QE: " + std::string(status_text(v.status())) + " for " + g.str();
        if (!v.counterexample().empty()) {
          msg += "; counterexample";
          for (const auto& [x, val] : v.counterexample()) msg += " " + x.str() + "=" + to_string(val);
        }
        throw ProofError(ProofErrorKind::Arithmetic, msg);
      }
      return kernel::admit_arithmetic(g, v);
    };
    return step(at, fn, what);
  }

  bool try_close(NodeId at) {
    const Sequent& g = goal(at);
    for (std::size_t j = 0; j < g.succ.size(); ++j)
      if (g.succ[j].op() == Op::True) {
        Rule r = Rule::close_true(j);
        step(at, [r](const Sequent& s, const USubst&) { return rule(s, r); }, "closeTrue");
        return true;
      }
    for (std::size_t i = 0; i < g.ante.size(); ++i)
      if (g.ante[i].op() == Op::False) {
        Rule r = Rule::close_false(i);
        step(at, [r](const Sequent& s, const USubst&) { return rule(s, r); }, "closeFalse");
        return true;
      }
    for (std::size_t i = 0; i < g.ante.size(); ++i)
      for (std::size_t j = 0; j < g.succ.size(); ++j)
        if (g.ante[i] == g.succ[j]) {
          Rule r = Rule::close(i, j);
          step(at, [r](const Sequent& s, const USubst&) { return rule(s, r); }, "id");
          return true;
        }
    return false;
  }

  // One propositional (and, when unfolding, box-structural) step; false when none applies.
  bool decompose(NodeId at, bool unfold) {
    const Sequent& g = goal(at);
    auto first = [&](Side side, const Pred& ok) -> std::optional<std::size_t> {
      const auto& fs = formulas(g, side);
      for (std::size_t i = 0; i < fs.size(); ++i)
        if (ok(fs[i])) return i;
      return std::nullopt;
    };
    auto apply_rule_kind = [&](RuleKind k, std::size_t i) {
      Rule r{k, i, 0, {}};
      step(at, [r](const Sequent& s, const USubst&) { return rule(s, r); }, rule_name(k));
    };
    struct Linear {
      RuleKind kind;
      Op op;
      Side side;
    };
    static const Linear linear[] = {{RuleKind::ImplyR, Op::Imply, Side::Succ}, {RuleKind::NotR, Op::Not, Side::Succ},
                                    {RuleKind::OrR, Op::Or, Side::Succ},       {RuleKind::AndL, Op::And, Side::Ante},
                                    {RuleKind::NotL, Op::Not, Side::Ante}};
    for (const auto& l : linear)
      if (auto i = first(l.side, op_is(l.op))) {
        apply_rule_kind(l.kind, *i);
        return true;
      }
    if (unfold) {
      static const std::pair<const char*, Op> boxes[] = {
          {"composeb", Op::Compose}, {"testb", Op::Test}, {"choiceb", Op::Choice}};
      for (Side side : {Side::Succ, Side::Ante}) {
        for (const auto& [ax, prog] : boxes) {
          if (auto i = first(side, box_of(prog))) {
            Position p{side, *i};
            std::string name = ax;
            step(at, [p, name](const Sequent& s, const USubst&) { return box_rewrite(s, p, name); }, name);
            return true;
          }
        }
        const auto& fs = formulas(g, side);
        for (std::size_t i = 0; i < fs.size(); ++i) {
          if (!box_of(Op::Assign)(fs[i])) continue;
          try {
            assign_step(at, Position{side, i}, "assignb");
            return true;
          } catch (const ProofError&) {
          }
        }
      }
    }
    static const Linear branching[] = {{RuleKind::AndR, Op::And, Side::Succ},
                                       {RuleKind::OrL, Op::Or, Side::Ante},
                                       {RuleKind::ImplyL, Op::Imply, Side::Ante},
                                       {RuleKind::EquivR, Op::Equiv, Side::Succ},
                                       {RuleKind::EquivL, Op::Equiv, Side::Ante}};
    for (const auto& l : branching)
      if (auto i = first(l.side, op_is(l.op))) {
        apply_rule_kind(l.kind, *i);
        return true;
      }
    return false;
  }

  void saturate(NodeId at, bool close, bool unfold, std::vector<NodeId>& out) {
    if (close && try_close(at)) return;
    if (!decompose(at, unfold)) {
      out.push_back(at);
      return;
    }
    std::vector<NodeId> kids = tree_.node(at).children;
    for (NodeId k : kids) saturate(k, close, unfold, out);
  }

  // Proves [ode&Q]P at succedent position i outright, or returns false.
  bool ode_auto(NodeId at, std::size_t i) {
    const Sequent& g = goal(at);
    const Expr& f = g.succ[i];
    const Expr& ode = f.child(0);
    const Expr& post = f.child(1);
    std::vector<Rule> tries;
    if (post.op() == Op::Cmp && post.cmp() != CmpOp::Ne) {
      tries.push_back(Rule::dI(i));
      for (const auto& c : cofactor_candidates(ode, post)) tries.push_back(Rule::dbx(c, i));
    }
    tries.push_back(Rule::dW(i));
    for (const auto& r : tries) {
      Provable p = start(g);
      try {
        p = rule(g, r);
      } catch (const std::exception&) {
        continue;
      }
      bool all = true;
      for (const auto& s : p.subgoals()) all = all && pv_.oracle_->qe(s).valid();
      if (!all) continue;
      std::vector<NodeId> kids =
          step(at, [r](const Sequent& s, const USubst& sigma) {
            Rule q = r;
            q.formula = subst(sigma, r.formula);
            return rule(s, q);
          }, rule_name(r.kind));
      for (NodeId k : kids) qe_step(k, "QE");
      return true;
    }
    return false;
  }

  std::vector<NodeId> atom(NodeId at, const Tactic& a) {
    const std::string& n = a.name;
    struct Simple {
      const char* name;
      RuleKind kind;
      Op op;
      bool succ;
    };
    static const Simple simple[] = {
        {"implyR", RuleKind::ImplyR, Op::Imply, true}, {"andR", RuleKind::AndR, Op::And, true},
        {"orR", RuleKind::OrR, Op::Or, true},          {"notR", RuleKind::NotR, Op::Not, true},
        {"equivR", RuleKind::EquivR, Op::Equiv, true}, {"implyL", RuleKind::ImplyL, Op::Imply, false},
        {"andL", RuleKind::AndL, Op::And, false},      {"orL", RuleKind::OrL, Op::Or, false},
        {"notL", RuleKind::NotL, Op::Not, false},      {"equivL", RuleKind::EquivL, Op::Equiv, false}};
    for (const auto& s : simple)
      if (n == s.name) return simple_rule(at, a, s.kind, s.op, s.succ);

    if (n == "id" || n == "close" || n == "closeId") {
      if (!try_close(at)) fail(ProofErrorKind::NotApplicable, n + ": no formula occurs on both sides of " + goal(at).str());
      return {};
    }
    if (n == "closeTrue" || n == "closeT") {
      Position p = locate(at, a, op_is(Op::True), true, false);
      Rule r = Rule::close_true(p.index);
      return step(at, [r](const Sequent& s, const USubst&) { return rule(s, r); }, n);
    }
    if (n == "closeFalse" || n == "closeF") {
      Position p = locate(at, a, op_is(Op::False), false, true);
      Rule r = Rule::close_false(p.index);
      return step(at, [r](const Sequent& s, const USubst&) { return rule(s, r); }, n);
    }
    if (n == "hideL" || n == "hideR") {
      bool succ = n == "hideR";
      Position p = locate(at, a, [](const Expr&) { return true; }, succ, !succ);
      Rule r = succ ? Rule::hideR(p.index) : Rule::hideL(p.index);
      return step(at, [r](const Sequent& s, const USubst&) { return rule(s, r); }, n);
    }
    if (n == "cut") {
      Expr c = parse_arg(at, a, 0, Category::Formula);
      return step(at, [c](const Sequent& s, const USubst& sigma) { return rule(s, Rule::cut(subst(sigma, c))); }, n,
                  {"Use", "Show"});
    }
    if (n == "testb") return box_step(at, a, "testb", Op::Test);
    if (n == "choiceb") return box_step(at, a, "choiceb", Op::Choice);
    if (n == "composeb") return box_step(at, a, "composeb", Op::Compose);
    if (n == "iterateb") return box_step(at, a, "iterateb", Op::Loop);
    if (n == "assignb") return assign_step(at, locate(at, a, box_of(Op::Assign), true, true), n);
    if (n == "loop") {
      Expr j = parse_arg(at, a, 0, Category::Formula);
      Position p = locate(at, a, box_of(Op::Loop), true, false);
      std::size_t i = p.index;
      return step(at, [j, i](const Sequent& s, const USubst& sigma) { return rule(s, Rule::loop(subst(sigma, j), i)); },
                  n, {"Init", "Step", "Post"});
    }
    if (n == "MR") {
      Expr q = parse_arg(at, a, 0, Category::Formula);
      Position p = locate(at, a, op_is(Op::Box), true, false);
      std::size_t i = p.index;
      StepFn fn = [q, i](const Sequent& g, const USubst& sigma) {
        Expr qq = subst(sigma, q);
        const Expr& f = g.succ.at(i);
        Provable pr = rule(g, Rule::cut(mk::box(f.child(0), qq)));
        for (std::size_t k = 0; k < g.ante.size(); ++k) pr = kernel::apply_rule(pr, 0, Rule::hideL(0));
        for (std::size_t k = g.succ.size(); k-- > 0;)
          if (k != i) pr = kernel::apply_rule(pr, 0, Rule::hideR(k));
        pr = kernel::apply_rule(pr, 0, Rule::monotone());
        return kernel::apply_rule(pr, 1, Rule::hideR(i));
      };
      return step(at, fn, n, {"Show [a]Q", "Use Q->P"});
    }
    if (n == "dW" || n == "DW" || n == "dI" || n == "DI") {
      Position p = locate(at, a, box_of(Op::Ode), true, false);
      Rule r = (n == "dW" || n == "DW") ? Rule::dW(p.index) : Rule::dI(p.index);
      return step(at, [r](const Sequent& s, const USubst&) { return rule(s, r); }, n);
    }
    if (n == "dC" || n == "DC" || n == "dbx") {
      bool dc = n != "dbx";
      Expr x = parse_arg(at, a, 0, dc ? Category::Formula : Category::Term);
      Position p = locate(at, a, box_of(Op::Ode), true, false);
      std::size_t i = p.index;
      return step(at, [x, i, dc](const Sequent& s, const USubst& sigma) {
        Expr y = subst(sigma, x);
        return rule(s, dc ? Rule::dC(y, i) : Rule::dbx(y, i));
      }, n, dc ? std::vector<std::string>{"Use", "Show"} : std::vector<std::string>{"Init", "Step"});
    }
    if (n == "ODE") {
      Position p = locate(at, a, box_of(Op::Ode), true, false);
      if (!ode_auto(at, p.index)) fail(ProofErrorKind::NotApplicable, "ODE: no invariant argument closes " + goal(at).str());
      return {};
    }
    if (n == "QE") return qe_step(at, n);
    if (n == "prop" || n == "unfold") {
      std::vector<NodeId> out;
      Quiet q(*this);
      saturate(at, n == "prop", n == "unfold", out);
      return out;
    }
    if (n == "autoClose" || n == "auto") {
      Quiet q(*this);
      std::vector<NodeId> a1;
      saturate(at, true, false, a1);
      std::vector<NodeId> a2;
      for (NodeId k : a1) saturate(k, true, true, a2);
      for (NodeId k : a2) {
        const Sequent& g = goal(k);
        bool done = false;
        for (std::size_t i = 0; i < g.succ.size() && !done; ++i)
          if (box_of(Op::Ode)(g.succ[i])) done = ode_auto(k, i);
        if (!done) {
          try {
            qe_step(k, "QE");
          } catch (const ProofError& e) {
            throw ProofError(ProofErrorKind::Arithmetic, n + " could not close " + g.str() + ": " + e.what(), k);
          }
        }
      }
      return {};
    }
    fail(ProofErrorKind::UnknownTactic, "unknown tactic " + n);
  }

  Prover& pv_;
  ProofTree& tree_;
  std::vector<Expr> hidden_;
  int quiet_ = 0;
};

// ---- Prover ----

Prover::Prover(Sequent goal, DefinitionRegistry defs, std::shared_ptr<LemmaStore> lemmas,
               std::shared_ptr<ArithOracle> oracle)
    : state_{ProofTree(std::move(goal)), std::move(defs), {}},
      lemmas_(std::move(lemmas)),
      oracle_(oracle ? std::move(oracle) : std::make_shared<ArithOracle>()) {}

Prover Prover::for_entry(const ArchiveEntry& entry, std::shared_ptr<LemmaStore> lemmas,
                         std::shared_ptr<ArithOracle> oracle) {
  DefinitionRegistry defs;
  try {
    defs = DefinitionRegistry(entry.definitions);
  } catch (const DefinitionError& e) {
    throw ProofError(ProofErrorKind::Definition, e.what());
  }
  return Prover(Sequent({}, {entry.problem}), std::move(defs), std::move(lemmas), std::move(oracle));
}

SymbolTable Prover::symbols() const {
  SymbolTable t = state_.defs.symbols();
  for (std::size_t i = 0; i < state_.tree.size(); ++i)
    for (const auto& s : signature(state_.tree.node(i).goal)) t.emplace(s.name, s);
  return t;
}

template <typename F>
auto Prover::transact(F&& f) {
  State saved = state_;
  try {
    return f();
  } catch (...) {
    state_ = std::move(saved);
    throw;
  }
}

std::vector<NodeId> Prover::run(NodeId at, const Tactic& t) {
  return transact([&] {
    Interpreter in(*this, state_.tree);
    return in.run(at, t);
  });
}

std::vector<NodeId> Prover::run(NodeId at, std::string_view tactic) {
  TacticPtr t;
  try {
    t = parse_tactic(tactic);
  } catch (const ParseError& e) {
    throw ProofError(ProofErrorKind::Syntax, e.what(), at);
  }
  return run(at, *t);
}

void Prover::expand(NodeId at, const std::string& name, ExpandScope scope) {
  transact([&] {
    Interpreter in(*this, state_.tree);
    TacticPtr t = Tactic::expand(name);
    if (scope == ExpandScope::Goal) {
      in.run(at, *t);
      return 0;
    }
    if (!state_.defs.has_body(name)) throw ProofError(ProofErrorKind::Definition, "symbol " + name + " has no definition");
    for (NodeId n : state_.tree.open_goals())
      if (mentions(state_.tree.node(n).goal, name)) in.run(n, *t);
    return 0;
  });
}

void Prover::expand_all(NodeId at) {
  transact([&] {
    Interpreter in(*this, state_.tree);
    in.run(at, *Tactic::expand_all());
    return 0;
  });
}

void Prover::define(const std::string& name, const Expr& repl, DefineEffect effect) {
  transact([&] {
    std::optional<Symbol> sym;
    SymbolTable table = symbols();
    auto it = table.find(name);
    if (it != table.end()) sym = it->second;
    if (!sym) throw ProofError(ProofErrorKind::NotFound, "unknown symbol " + name);
    try {
      state_.defs.define(*sym, repl);
    } catch (const DefinitionError& e) {
      throw ProofError(ProofErrorKind::Definition, e.what());
    } catch (const std::exception& e) {
      throw ProofError(ProofErrorKind::Definition, std::string("definition of ") + name + ": " + e.what());
    }
    if (effect == DefineEffect::RegistryOnly) return 0;
    state_.globals.push_back(state_.defs.pair(name));
    Interpreter in(*this, state_.tree);
    TacticPtr t = Tactic::expand(name);
    for (NodeId n : state_.tree.open_goals())
      if (mentions(state_.tree.node(n).goal, name)) in.run(n, *t);
    return 0;
  });
}

void Prover::define(const std::string& name, std::string_view repl_text, DefineEffect effect) {
  SymbolTable table = symbols();
  auto it = table.find(name);
  if (it == table.end()) throw ProofError(ProofErrorKind::NotFound, "unknown symbol " + name);
  Expr repl;
  try {
    repl = parse_expr(repl_text, replacement_category(it->second.kind), table);
  } catch (const ParseError& e) {
    throw ProofError(ProofErrorKind::Syntax, "definition of " + name + ": " + e.what());
  }
  define(name, repl, effect);
}

std::vector<NodeId> Prover::use_lemma(NodeId at, const std::string& name, TacticPtr adaptation) {
  return transact([&] {
    Interpreter in(*this, state_.tree);
    return in.run(at, *Tactic::use_lemma(name, adaptation));
  });
}

std::vector<NodeId> Prover::using_block(NodeId at, const Tactic& t, const std::vector<Expr>& keep) {
  return transact([&] {
    Interpreter in(*this, state_.tree);
    std::vector<std::string> texts;
    for (const auto& k : keep) texts.push_back(print(k));
    auto out = in.using_block(at, t, keep);
    state_.tree.set_text(at, print(*Tactic::using_(std::make_shared<Tactic>(t), texts)));
    return out;
  });
}

namespace {

void note_unresolved(FinalizeResult& r, const DefinitionRegistry& defs) {
  std::set<Symbol> seen;
  for (const auto& g : r.provable.subgoals())
    for (const auto& s : signature(g))
      if (!defs.has_body(s.name) && s.name.rfind("hidden__", 0) != 0 && seen.insert(s).second) r.unresolved.push_back(s);
}

}  // namespace

FinalizeResult Prover::finalize() const {
  FinalizeResult r = usp::finalize(state_.tree, state_.globals);
  note_unresolved(r, state_.defs);
  return r;
}

FinalizeResult Prover::finalize_eager() const {
  FinalizeResult r = usp::finalize_eager(state_.tree, state_.globals);
  note_unresolved(r, state_.defs);
  return r;
}

std::size_t Prover::start_sublemma(NodeId at) {
  const ProofNode& n = state_.tree.node(at);
  if (!n.open()) throw ProofError(ProofErrorKind::NotOpen, "goal " + std::to_string(at) + " is not open", at);
  Sub s;
  s.origin = at;
  s.prover = std::make_shared<Prover>(n.goal, state_.defs, lemmas_, oracle_);
  subs_.push_back(std::move(s));
  return subs_.size() - 1;
}

Prover& Prover::sublemma(std::size_t id) {
  if (id >= subs_.size()) throw ProofError(ProofErrorKind::NotFound, "no sub-lemma " + std::to_string(id));
  return *subs_[id].prover;
}

bool Prover::finish_sublemma(std::size_t id) {
  Prover& sp = sublemma(id);
  Sub& s = subs_[id];
  if (s.applied) return true;
  FinalizeResult r = sp.finalize();
  if (!r.provable.closed()) return false;
  transact([&] {
    NodeId at = s.origin;
    if (!state_.tree.node(at).open())
      throw ProofError(ProofErrorKind::NotOpen, "goal " + std::to_string(at) + " is no longer open", at);
    Provable lemma = r.provable;
    if (lemma.conclusion() != state_.tree.node(at).goal) {
      std::vector<SubstPair> pairs = r.substitution.pairs();
      USubst sigma = r.substitution;
      Sequent g = usubst_sequent(sigma, state_.tree.node(at).goal);
      StepRecord st;
      st.kind = StepKind::Subst;
      st.subst = pairs;
      at = state_.tree.attach(at, std::move(st), {g})[0];
      if (lemma.conclusion() != g)
        throw ProofError(ProofErrorKind::Lemma, "sub-lemma concludes " + lemma.conclusion().str(), at);
    }
    StepRecord st;
    st.kind = StepKind::Rule;
    st.provable = lemma;
    st.redo = [lemma](const Sequent& g, const USubst& sigma) {
      USubst local = restrict_to(sigma, provable_signature(lemma));
      Provable p = local.empty() ? lemma : kernel::usubst_provable(lemma, local);
      if (p.conclusion() != g) throw KernelError("sub-lemma does not conclude " + g.str());
      return p;
    };
    st.text = "(" + sp.extract_tactic() + ")";
    state_.tree.attach(at, std::move(st), {});
    return 0;
  });
  s.applied = true;
  return true;
}

}  // namespace usp
