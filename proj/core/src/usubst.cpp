#include "usp/usubst.hpp"

#include "usp/printer.hpp"

namespace usp {

namespace {

std::string path_text(const std::vector<std::size_t>& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "." : "") + std::to_string(path[i]);
  return s.empty() ? "root" : s;
}

VarSet with_primes(const std::vector<Variable>& xs) {
  VarSet r;
  for (const auto& x : xs) {
    r.insert(x);
    r.insert(x.prime());
  }
  return r;
}

class Substitutor {
 public:
  explicit Substitutor(const USubst& s) : sigma_(s) {}

  // U: taboo for applied symbols (all binders in scope after substitution).
  // L: taboo for wild symbols (binders written literally in the input).
  Expr go(const Expr& e, const VarSet& U, const VarSet& L) {
    switch (e.op()) {
      case Op::Func:
      case Op::Pred: return apply_symbol(e, U, L);
      case Op::Differential: {
        VarSet all = VarSet::all();
        return mk::with_children(e, {at(0, e.child(0), all, all)});
      }
      case Op::Forall:
      case Op::Exists: {
        VarSet x{e.var()};
        return mk::with_children(e, {at(0, e.child(0), U | x, L | x)});
      }
      case Op::Box:
      case Op::Diamond: {
        path_.push_back(0);
        ProgResult a = prog(e.child(0), U, L);
        path_.pop_back();
        Expr post = at(1, e.child(1), a.U, a.L);
        return mk::with_children(e, {a.e, post});
      }
      default:
        if (e.is_program()) return prog(e, U, L).e;
        return rebuild(e, U, L);
    }
  }

 private:
  struct ProgResult {
    Expr e;
    VarSet U;
    VarSet L;
  };

  Expr at(std::size_t i, const Expr& e, const VarSet& U, const VarSet& L) {
    path_.push_back(i);
    Expr r = go(e, U, L);
    path_.pop_back();
    return r;
  }

  Expr rebuild(const Expr& e, const VarSet& U, const VarSet& L) {
    if (e.arity() == 0) return e;
    std::vector<Expr> kids;
    kids.reserve(e.arity());
    for (std::size_t i = 0; i < e.arity(); ++i) kids.push_back(at(i, e.child(i), U, L));
    return mk::with_children(e, std::move(kids));
  }

  Expr apply_symbol(const Expr& e, const VarSet& U, const VarSet& L) {
    std::vector<Expr> args;
    args.reserve(e.arity());
    for (std::size_t i = 0; i < e.arity(); ++i) args.push_back(at(i, e.child(i), U, L));
    const SubstPair* pair = sigma_.find(e.symbol());
    if (!pair) return args.empty() ? e : mk::with_children(e, std::move(args));
    if (pair->what != e.symbol())
      throw USubstError("substitution for " + pair->what.str() + " does not fit occurrence " + e.symbol().str());
    const VarSet& taboo = e.symbol().space == Space::Wild ? L : U;
    VarSet offending = free_vars(pair->repl) & taboo;
    if (!offending.empty()) throw ClashError(e.symbol(), path_, taboo, offending);
    return instantiate_dots(e.symbol(), pair->repl, args);
  }

  ProgResult prog(const Expr& a, const VarSet& U, const VarSet& L) {
    switch (a.op()) {
      case Op::Assign: {
        VarSet x{a.var()};
        return {mk::with_children(a, {at(0, a.child(0), U, L)}), U | x, L | x};
      }
      case Op::Test: return {mk::with_children(a, {at(0, a.child(0), U, L)}), U, L};
      case Op::Ode: {
        VarSet b = with_primes({a.ode_vars().begin(), a.ode_vars().end()});
        VarSet U2 = U | b;
        VarSet L2 = L | b;
        return {rebuild(a, U2, L2), U2, L2};
      }
      case Op::Choice: {
        path_.push_back(0);
        ProgResult l = prog(a.child(0), U, L);
        path_.back() = 1;
        ProgResult r = prog(a.child(1), U, L);
        path_.pop_back();
        return {mk::with_children(a, {l.e, r.e}), l.U | r.U, l.L | r.L};
      }
      case Op::Compose: {
        path_.push_back(0);
        ProgResult l = prog(a.child(0), U, L);
        path_.back() = 1;
        ProgResult r = prog(a.child(1), l.U, l.L);
        path_.pop_back();
        return {mk::with_children(a, {l.e, r.e}), r.U, r.L};
      }
      case Op::Loop: {
        VarSet u = U;
        VarSet l = L;
        path_.push_back(0);
        while (true) {
          ProgResult body = prog(a.child(0), u, l);
          if (body.U == u && body.L == l) {
            path_.pop_back();
            return {mk::with_children(a, {body.e}), u, l};
          }
          u = body.U;
          l = body.L;
        }
      }
      case Op::ProgConst: {
        const SubstPair* pair = sigma_.find(a.symbol());
        Expr r = pair ? pair->repl : a;
        return {r, U | bound_vars(r), L};
      }
      default: throw USubstError("not a program: " + print(a));
    }
  }

  const USubst& sigma_;
  std::vector<std::size_t> path_;
};

Expr dots(const Symbol& owner, const Expr& e, const std::vector<Expr>& args, const VarSet& B);

// Dot replacement inside a program; returns the binders in scope afterwards.
std::pair<Expr, VarSet> dots_prog(const Symbol& owner, const Expr& a, const std::vector<Expr>& args,
                                  const VarSet& B) {
  switch (a.op()) {
    case Op::Assign: return {mk::with_children(a, {dots(owner, a.child(0), args, B)}), B | VarSet{a.var()}};
    case Op::Test: return {mk::with_children(a, {dots(owner, a.child(0), args, B)}), B};
    case Op::Ode: {
      VarSet inner = B | bound_vars(a);
      std::vector<Expr> kids;
      for (const auto& c : a.children()) kids.push_back(dots(owner, c, args, inner));
      return {mk::with_children(a, std::move(kids)), inner};
    }
    case Op::Choice: {
      auto l = dots_prog(owner, a.child(0), args, B);
      auto r = dots_prog(owner, a.child(1), args, B);
      return {mk::with_children(a, {l.first, r.first}), l.second | r.second};
    }
    case Op::Compose: {
      auto l = dots_prog(owner, a.child(0), args, B);
      auto r = dots_prog(owner, a.child(1), args, l.second);
      return {mk::with_children(a, {l.first, r.first}), r.second};
    }
    case Op::Loop: {
      VarSet inner = B | bound_vars(a);
      return {mk::with_children(a, {dots_prog(owner, a.child(0), args, inner).first}), inner};
    }
    default: return {a, B | bound_vars(a)};
  }
}

Expr dots(const Symbol& owner, const Expr& e, const std::vector<Expr>& args, const VarSet& B) {
  switch (e.op()) {
    case Op::Dot: {
      if (e.dot_index() >= args.size())
        throw USubstError("replacement for " + owner.str() + " uses argument ._" + std::to_string(e.dot_index()));
      VarSet offending = free_vars(args[e.dot_index()]) & B;
      if (!offending.empty()) throw ClashError(owner, {}, B, offending);
      return args[e.dot_index()];
    }
    case Op::Forall:
    case Op::Exists: return mk::with_children(e, {dots(owner, e.child(0), args, B | VarSet{e.var()})});
    case Op::Differential: return mk::with_children(e, {dots(owner, e.child(0), args, VarSet::all())});
    case Op::Box:
    case Op::Diamond: {
      auto a = dots_prog(owner, e.child(0), args, B);
      return mk::with_children(e, {a.first, dots(owner, e.child(1), args, a.second)});
    }
    default: {
      if (e.is_program()) return dots_prog(owner, e, args, B).first;
      if (e.arity() == 0) return e;
      std::vector<Expr> kids;
      for (const auto& c : e.children()) kids.push_back(dots(owner, c, args, B));
      return mk::with_children(e, std::move(kids));
    }
  }
}

Variable swap(const Variable& v, const Variable& x, const Variable& y) {
  if (v.base() == x.base()) return v.primed ? y.base().prime() : y.base();
  if (v.base() == y.base()) return v.primed ? x.base().prime() : x.base();
  return v;
}

// Replaces the free occurrences of x in f by the dot, where that is unambiguous
// (occurrences after a possible rebinding of x are left alone).
Expr abstract_free(const Expr& f, const Variable& x, unsigned k, bool& bound_after);

Expr abstract_prog(const Expr& a, const Variable& x, unsigned k, bool& bound) {
  if (bound) return a;
  switch (a.op()) {
    case Op::Assign: {
      bool b = false;
      Expr r = mk::with_children(a, {abstract_free(a.child(0), x, k, b)});
      if (a.var() == x) bound = true;
      return r;
    }
    case Op::Test: {
      bool b = false;
      return mk::with_children(a, {abstract_free(a.child(0), x, k, b)});
    }
    case Op::Ode: {
      if (bound_vars(a).contains(x)) {
        bound = true;
        return a;
      }
      std::vector<Expr> kids;
      for (const auto& c : a.children()) {
        bool b = false;
        kids.push_back(abstract_free(c, x, k, b));
      }
      return mk::with_children(a, std::move(kids));
    }
    case Op::Choice: {
      bool l = false;
      bool r = false;
      Expr e = mk::with_children(a, {abstract_prog(a.child(0), x, k, l), abstract_prog(a.child(1), x, k, r)});
      bound = l || r;
      return e;
    }
    case Op::Compose: {
      Expr l = abstract_prog(a.child(0), x, k, bound);
      Expr r = abstract_prog(a.child(1), x, k, bound);
      return mk::with_children(a, {l, r});
    }
    case Op::Loop: {
      if (bound_vars(a).contains(x)) {
        bound = true;
        return a;
      }
      bool b = false;
      return mk::with_children(a, {abstract_prog(a.child(0), x, k, b)});
    }
    default:
      bound = bound || bound_vars(a).contains(x);
      return a;
  }
}

Expr abstract_free(const Expr& f, const Variable& x, unsigned k, bool& bound_after) {
  switch (f.op()) {
    case Op::Var: return f.var() == x ? mk::dot(k) : f;
    case Op::Forall:
    case Op::Exists:
      if (f.var() == x) return f;
      return mk::with_children(f, {abstract_free(f.child(0), x, k, bound_after)});
    case Op::Box:
    case Op::Diamond: {
      bool bound = false;
      Expr a = abstract_prog(f.child(0), x, k, bound);
      Expr post = f.child(1);
      if (!bound) {
        bool b = false;
        post = abstract_free(post, x, k, b);
      }
      return mk::with_children(f, {a, post});
    }
    case Op::Differential: return f;
    default: {
      if (f.arity() == 0) return f;
      std::vector<Expr> kids;
      for (const auto& c : f.children()) {
        bool b = false;
        kids.push_back(abstract_free(c, x, k, b));
      }
      return mk::with_children(f, std::move(kids));
    }
  }
}

}  // namespace

ClashError::ClashError(Symbol symbol, std::vector<std::size_t> path, VarSet taboo, VarSet offending)
    : std::runtime_error("clash: substitution for " + symbol.str() + " at " + path_text(path) +
                         " introduces " + offending.str() + " where " + taboo.str() + " is bound"),
      symbol_(std::move(symbol)),
      path_(std::move(path)),
      taboo_(std::move(taboo)),
      offending_(std::move(offending)) {}

Category replacement_category(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Function: return Category::Term;
    case SymbolKind::Predicate: return Category::Formula;
    case SymbolKind::Program: return Category::Program;
  }
  return Category::Term;
}

Expr symbol_pattern(const Symbol& s) {
  if (s.kind == SymbolKind::Program) return mk::prog(s);
  std::vector<Expr> args;
  if (s.space == Space::Applied)
    for (unsigned i = 0; i < s.arity; ++i) args.push_back(mk::dot(i));
  return s.kind == SymbolKind::Function ? mk::func(s, std::move(args)) : mk::pred(s, std::move(args));
}

std::string SubstPair::str() const { return print(symbol_pattern(what)) + "~>" + print(repl); }

USubst& USubst::add(const Symbol& what, const Expr& repl) {
  if (!repl.valid()) throw USubstError("empty replacement for " + what.str());
  if (repl.category() != replacement_category(what.kind))
    throw USubstError("replacement for " + what.str() + " has the wrong category: " + print(repl));
  unsigned n = what.space == Space::Wild ? 0 : what.arity;
  if (dot_count(repl) > n)
    throw USubstError("replacement for " + what.str() + " uses more arguments than the symbol takes");
  for (const auto& p : pairs_)
    if (same_head(p.what, what)) throw USubstError("duplicate substitution for " + what.name);
  pairs_.push_back({what, repl});
  return *this;
}

const SubstPair* USubst::find(const Symbol& s) const {
  for (const auto& p : pairs_)
    if (same_head(p.what, s)) return &p;
  return nullptr;
}

std::string USubst::str() const {
  std::string s = "{";
  for (std::size_t i = 0; i < pairs_.size(); ++i) s += (i ? ", " : "") + pairs_[i].str();
  return s + "}";
}

Expr usubst_expr(const USubst& sigma, const Expr& e) {
  if (sigma.empty()) return e;
  return Substitutor(sigma).go(e, {}, {});
}

Sequent usubst_sequent(const USubst& sigma, const Sequent& s) {
  Sequent r;
  for (const auto& f : s.ante) r.ante.push_back(usubst_expr(sigma, f));
  for (const auto& f : s.succ) r.succ.push_back(usubst_expr(sigma, f));
  return r;
}

USubst compose(const USubst& sigma, const USubst& tau) {
  USubst r;
  for (const auto& p : tau.pairs()) r.add(p.what, usubst_expr(sigma, p.repl));
  for (const auto& p : sigma.pairs())
    if (!tau.contains(p.what)) r.add(p.what, p.repl);
  return r;
}

Expr rename_var(const Expr& e, const Variable& x, const Variable& y) {
  switch (e.op()) {
    case Op::Var: return mk::var(swap(e.var(), x, y));
    case Op::Num:
    case Op::Dot:
    case Op::True:
    case Op::False:
    case Op::ProgConst: return e;
    default: break;
  }
  std::vector<Expr> kids;
  for (const auto& c : e.children()) kids.push_back(rename_var(c, x, y));
  Expr r = kids.empty() ? e : mk::with_children(e, std::move(kids));
  if (e.op() == Op::Assign || e.op() == Op::Forall || e.op() == Op::Exists) r = mk::with_var(r, swap(e.var(), x, y));
  if (e.op() == Op::Ode) {
    std::vector<Variable> vs;
    for (const auto& v : e.ode_vars()) vs.push_back(swap(v, x, y));
    r = mk::with_ode_vars(r, std::move(vs));
  }
  return r;
}

Sequent rename_var(const Sequent& s, const Variable& x, const Variable& y) {
  Sequent r;
  for (const auto& f : s.ante) r.ante.push_back(rename_var(f, x, y));
  for (const auto& f : s.succ) r.succ.push_back(rename_var(f, x, y));
  return r;
}

Expr instantiate_dots(const Symbol& owner, const Expr& body, const std::vector<Expr>& args) {
  if (args.empty() && dot_count(body) == 0) return body;
  return dots(owner, body, args, {});
}

Expr abstract_variable(const Expr& f, const Variable& x, unsigned k) {
  bool bound = false;
  return abstract_free(f, x, k, bound);
}

}  // namespace usp
