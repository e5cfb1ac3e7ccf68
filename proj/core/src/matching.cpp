#include "usp/printer.hpp"
#include "usp/prover.hpp"

namespace usp {

namespace {

[[noreturn]] void no_match(const std::string& why) { throw ProofError(ProofErrorKind::Lemma, "no match: " + why); }

Expr replace_term(const Expr& e, const Expr& what, const Expr& by) {
  if (e == what) return by;
  if (e.arity() == 0) return e;
  std::vector<Expr> kids;
  bool changed = false;
  for (const auto& c : e.children()) {
    kids.push_back(replace_term(c, what, by));
    changed = changed || kids.back() != c;
  }
  return changed ? mk::with_children(e, std::move(kids)) : e;
}

class Matcher {
 public:
  void go(const Expr& p, const Expr& t) {
    switch (p.op()) {
      case Op::Func:
      case Op::Pred: {
        const Symbol& s = p.symbol();
        if (p.category() != t.category()) no_match(print(p) + " vs " + print(t));
        Expr r = t;
        if (s.space == Space::Applied) {
          for (std::size_t k = 0; k < p.arity(); ++k) {
            const Expr& arg = p.child(k);
            r = arg.op() == Op::Var ? abstract_variable(r, arg.var(), static_cast<unsigned>(k))
                                    : replace_term(r, arg, mk::dot(static_cast<unsigned>(k)));
          }
        }
        bind(s, r);
        return;
      }
      case Op::ProgConst:
        if (!t.is_program()) no_match(print(p) + " vs " + print(t));
        bind(p.symbol(), t);
        return;
      default: break;
    }
    if (p.op() != t.op() || p.arity() != t.arity()) no_match(print(p) + " vs " + print(t));
    if (p.arity() == 0) {
      if (p != t) no_match(print(p) + " vs " + print(t));
      return;
    }
    std::vector<Expr> kids(t.children().begin(), t.children().end());
    try {
      if (mk::with_children(p, kids) != t) no_match(print(p) + " vs " + print(t));
    } catch (const ExprError&) {
      no_match(print(p) + " vs " + print(t));
    }
    for (std::size_t k = 0; k < p.arity(); ++k) go(p.child(k), t.child(k));
  }

  USubst result() const {
    USubst s;
    for (const auto& pr : pairs_) s.add(pr.what, pr.repl);
    return s;
  }

 private:
  void bind(const Symbol& s, const Expr& r) {
    for (const auto& pr : pairs_) {
      if (!same_head(pr.what, s)) continue;
      if (pr.repl != r || pr.what.arity != s.arity)
        no_match("symbol " + s.name + " would need both " + print(pr.repl) + " and " + print(r));
      return;
    }
    pairs_.push_back({s, r});
  }

  std::vector<SubstPair> pairs_;
};

void check(const USubst& s, const Expr& p, const Expr& t) {
  Expr got;
  try {
    got = usubst_expr(s, p);
  } catch (const std::exception& e) {
    no_match(e.what());
  }
  if (got != t) no_match(print(got) + " vs " + print(t));
}

}  // namespace

USubst match(const Expr& pattern, const Expr& target) {
  Matcher m;
  m.go(pattern, target);
  USubst s = m.result();
  check(s, pattern, target);
  return s;
}

USubst match(const Sequent& pattern, const Sequent& target) {
  if (pattern.ante.size() != target.ante.size() || pattern.succ.size() != target.succ.size())
    no_match("sequent shapes differ");
  Matcher m;
  for (std::size_t i = 0; i < pattern.ante.size(); ++i) m.go(pattern.ante[i], target.ante[i]);
  for (std::size_t i = 0; i < pattern.succ.size(); ++i) m.go(pattern.succ[i], target.succ[i]);
  USubst s = m.result();
  Sequent got;
  try {
    got = usubst_sequent(s, pattern);
  } catch (const std::exception& e) {
    no_match(e.what());
  }
  if (got != target) no_match(got.str() + " vs " + target.str());
  return s;
}

USubst parse_substitution(const std::vector<std::pair<std::string, std::string>>& pairs, const SymbolTable& symbols) {
  USubst out;
  for (const auto& [lhs, rhs] : pairs) {
    Expr what;
    Expr repl;
    try {
      if (!lhs.empty() && lhs.back() == ';') {
        what = parse_program(lhs, symbols);
        repl = parse_program(rhs, symbols);
      } else {
        try {
          what = parse_formula(lhs, symbols);
          if (what.op() != Op::Pred) throw ParseError("not a predicate", 1, 1);
          repl = parse_formula(rhs, symbols);
        } catch (const ParseError&) {
          what = parse_term(lhs, symbols);
          repl = parse_term(rhs, symbols);
        }
      }
    } catch (const ParseError& e) {
      throw ProofError(ProofErrorKind::Syntax, "substitution " + lhs + "~>" + rhs + ": " + e.what());
    }
    if (what.op() != Op::Pred && what.op() != Op::Func && what.op() != Op::ProgConst)
      throw ProofError(ProofErrorKind::Syntax, "left side of " + lhs + "~>" + rhs + " is not a symbol");
    if (what.op() != Op::ProgConst && what.symbol().space == Space::Applied) {
      for (std::size_t k = 0; k < what.arity(); ++k) {
        const Expr& a = what.child(k);
        if (a.op() == Op::Dot) continue;
        if (a.op() != Op::Var)
          throw ProofError(ProofErrorKind::Syntax, "argument of " + lhs + " must be a variable or a dot");
        repl = abstract_variable(repl, a.var(), static_cast<unsigned>(k));
      }
    }
    try {
      out.add(what.symbol(), repl);
    } catch (const std::exception& e) {
      throw ProofError(ProofErrorKind::Syntax, std::string("substitution ") + lhs + "~>" + rhs + ": " + e.what());
    }
  }
  return out;
}

}  // namespace usp
