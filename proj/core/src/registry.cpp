#include "usp/registry.hpp"

#include "usp/printer.hpp"
#include "usp/static_semantics.hpp"

namespace usp {

namespace {

bool same_symbol(const Symbol& a, const Symbol& b) { return a.name == b.name && a.kind == b.kind; }

bool mentions(const Expr& e, const Symbol& s) {
  for (const auto& t : signature(e))
    if (same_symbol(t, s)) return true;
  return false;
}

}  // namespace

USubst close_substitution(const std::vector<SubstPair>& pairs) {
  std::vector<SubstPair> merged;
  for (const auto& p : pairs) {
    bool seen = false;
    for (const auto& m : merged) {
      if (!same_symbol(m.what, p.what)) continue;
      if (m.repl != p.repl || m.what.arity != p.what.arity)
        throw DefinitionError("conflicting substitutions for " + p.what.name + ": " + m.str() + " and " + p.str());
      seen = true;
    }
    if (!seen) merged.push_back(p);
  }
  for (std::size_t round = 0; round <= merged.size(); ++round) {
    USubst current;
    for (const auto& m : merged) current.add(m.what, m.repl);
    bool pending = false;
    for (auto& m : merged) {
      for (const auto& other : merged) {
        if (mentions(m.repl, other.what)) {
          pending = true;
          break;
        }
      }
    }
    if (!pending) return current;
    for (auto& m : merged) m.repl = usubst_expr(current, m.repl);
  }
  throw DefinitionError("cyclic definitions");
}

DefinitionRegistry::DefinitionRegistry(const std::vector<Definition>& defs) {
  for (const auto& d : defs) add(d);
}

void DefinitionRegistry::add(const Definition& d) {
  if (find(d.name)) throw DefinitionError("symbol " + d.name + " is already declared");
  if (d.body) {
    Category want = d.kind == DefKind::Bool ? Category::Formula : d.kind == DefKind::Real ? Category::Term : Category::Program;
    if (d.body->category() != want) throw DefinitionError("body of " + d.name + " has the wrong category");
    if (mentions(*d.body, d.symbol())) throw DefinitionError("definition of " + d.name + " is recursive");
  }
  defs_.push_back(d);
  if (d.body) {
    try {
      std::vector<SubstPair> all;
      for (const auto& x : defs_)
        if (x.body) all.push_back(pair(x.name));
      close_substitution(all);
    } catch (const std::exception& e) {
      defs_.pop_back();
      throw DefinitionError(std::string("definition of ") + d.name + " rejected: " + e.what());
    }
  }
}

void DefinitionRegistry::define(const Symbol& symbol, const Expr& repl) {
  if (replacement_category(symbol.kind) != repl.category())
    throw DefinitionError("definition of " + symbol.name + " has the wrong category");
  if (dot_count(repl) > symbol.arity)
    throw DefinitionError("definition of " + symbol.name + " uses more arguments than its arity");
  Definition d;
  d.name = symbol.name;
  d.kind = symbol.kind == SymbolKind::Predicate ? DefKind::Bool
           : symbol.kind == SymbolKind::Function ? DefKind::Real
                                                 : DefKind::HP;
  std::set<Variable> used = all_vars(repl);
  std::vector<Expr> args;
  for (unsigned k = 0; k < symbol.arity; ++k) {
    Variable v("t", k);
    while (used.count(v)) v = Variable(v.name + "t", k);
    d.params.push_back(v);
    args.push_back(mk::var(v));
  }
  d.body = symbol.arity ? instantiate_dots(symbol, repl, args) : repl;
  for (auto it = defs_.begin(); it != defs_.end(); ++it) {
    if (it->name != symbol.name) continue;
    if (it->body) throw DefinitionError("symbol " + symbol.name + " is already defined");
    if (it->symbol() != symbol) throw DefinitionError("symbol " + symbol.name + " is declared with a different kind or arity");
    Definition old = *it;
    defs_.erase(it);
    try {
      add(d);
    } catch (...) {
      defs_.push_back(old);
      throw;
    }
    return;
  }
  add(d);
}

const Definition* DefinitionRegistry::find(const std::string& name) const {
  for (const auto& d : defs_)
    if (d.name == name) return &d;
  return nullptr;
}

bool DefinitionRegistry::has_body(const std::string& name) const {
  const Definition* d = find(name);
  return d && d->body;
}

SymbolTable DefinitionRegistry::symbols() const {
  SymbolTable t;
  for (const auto& d : defs_) t[d.name] = d.symbol();
  return t;
}

SubstPair DefinitionRegistry::pair(const std::string& name) const {
  const Definition* d = find(name);
  if (!d || !d->body) throw DefinitionError("symbol " + name + " has no definition");
  return {d->symbol(), *d->replacement()};
}

std::set<std::string> DefinitionRegistry::reachable(const std::set<Symbol>& sig) const {
  std::set<std::string> out;
  std::vector<Symbol> work(sig.begin(), sig.end());
  while (!work.empty()) {
    Symbol s = work.back();
    work.pop_back();
    const Definition* d = find(s.name);
    if (!d || !d->body || !same_symbol(d->symbol(), s) || out.count(s.name)) continue;
    out.insert(s.name);
    for (const auto& t : signature(*d->body)) work.push_back(t);
  }
  return out;
}

Expr DefinitionRegistry::expand_all(const Expr& e) const {
  std::vector<SubstPair> pairs;
  for (const auto& n : reachable(signature(e))) pairs.push_back(pair(n));
  if (pairs.empty()) return e;
  return usubst_expr(close_substitution(pairs), e);
}

Sequent DefinitionRegistry::expand_all(const Sequent& s) const {
  std::vector<SubstPair> pairs;
  for (const auto& n : reachable(signature(s))) pairs.push_back(pair(n));
  if (pairs.empty()) return s;
  return usubst_sequent(close_substitution(pairs), s);
}

}  // namespace usp
