#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "usp/archive.hpp"
#include "usp/usubst.hpp"

namespace usp {

class DefinitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Composes pairs into one substitution whose images mention no substituted symbol.
// Throws DefinitionError on two different images for one symbol or on cycles.
USubst close_substitution(const std::vector<SubstPair>& pairs);

class DefinitionRegistry {
 public:
  DefinitionRegistry() = default;
  explicit DefinitionRegistry(const std::vector<Definition>& defs);

  // Rejects duplicates, recursion, and category errors.
  void add(const Definition& d);
  // Gives a body to a declared-but-uninterpreted symbol, or declares a new one.
  // `repl` is in dot form (._k for argument k). Throws DefinitionError if already defined.
  void define(const Symbol& symbol, const Expr& repl);

  const Definition* find(const std::string& name) const;
  bool has_body(const std::string& name) const;
  const std::vector<Definition>& definitions() const { return defs_; }
  SymbolTable symbols() const;

  SubstPair pair(const std::string& name) const;  // one-step; requires a body
  // Names with bodies occurring in e, plus those reachable through their bodies.
  std::set<std::string> reachable(const std::set<Symbol>& signature) const;
  Expr expand_all(const Expr& e) const;
  Sequent expand_all(const Sequent& s) const;

 private:
  std::vector<Definition> defs_;
};

}  // namespace usp
