#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "usp/expr.hpp"
#include "usp/sequent.hpp"
#include "usp/static_semantics.hpp"

namespace usp {

// One substitution pair. `what` is the symbol; `repl` uses dots ._0 .. ._{n-1}
// (._0 prints as `.`) for the arguments of an n-ary applied symbol.
struct SubstPair {
  Symbol what;
  Expr repl;

  std::string str() const;  // "f(.)~>.+1"
  friend bool operator==(const SubstPair& a, const SubstPair& b) { return a.what == b.what && a.repl == b.repl; }
};

class USubstError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Admissibility violation: `symbol`'s replacement would put a taboo variable in scope.
class ClashError : public std::runtime_error {
 public:
  ClashError(Symbol symbol, std::vector<std::size_t> path, VarSet taboo, VarSet offending);

  const Symbol& symbol() const { return symbol_; }
  const std::vector<std::size_t>& path() const { return path_; }
  const VarSet& taboo() const { return taboo_; }
  const VarSet& offending() const { return offending_; }

 private:
  Symbol symbol_;
  std::vector<std::size_t> path_;
  VarSet taboo_;
  VarSet offending_;
};

class USubst {
 public:
  USubst() = default;

  // Validates category, arity, and dot usage; one pair per symbol name and kind.
  USubst& add(const Symbol& what, const Expr& repl);

  const std::vector<SubstPair>& pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }
  const SubstPair* find(const Symbol& s) const;
  bool contains(const Symbol& s) const { return find(s) != nullptr; }

  std::string str() const;  // "{f(.)~>.+1, p~>x>0}"
  friend bool operator==(const USubst& a, const USubst& b) { return a.pairs_ == b.pairs_; }

 private:
  std::vector<SubstPair> pairs_;
};

// Category of the replacement a symbol kind requires.
Category replacement_category(SymbolKind kind);

// The application pattern for a symbol: f(._0,...,._{n-1}), p(||), or a program constant.
Expr symbol_pattern(const Symbol& s);

// One-pass uniform substitution with admissibility checking; throws ClashError.
Expr usubst_expr(const USubst& sigma, const Expr& e);
Sequent usubst_sequent(const USubst& sigma, const Sequent& s);

// sigma after tau: the substitution equal to applying tau, then sigma (domains may overlap).
USubst compose(const USubst& sigma, const USubst& tau);

// Transposition renaming: swaps x<->y and x'<->y' everywhere, binders included.
Expr rename_var(const Expr& e, const Variable& x, const Variable& y);
Sequent rename_var(const Sequent& s, const Variable& x, const Variable& y);

// Replaces the dots of `body` by `args` with capture checking against binders in `body`.
Expr instantiate_dots(const Symbol& owner, const Expr& body, const std::vector<Expr>& args);

// Replaces the free occurrences of x in f by the dot ._k. Occurrences that may follow a
// rebinding of x stay literal, so instantiating the dot with x gives back f.
Expr abstract_variable(const Expr& f, const Variable& x, unsigned k);

}  // namespace usp
