#pragma once

#include <set>
#include <string>

#include "usp/expr.hpp"
#include "usp/sequent.hpp"

namespace usp {

// A finite set of variables or the set of all variables.
class VarSet {
 public:
  VarSet() = default;
  VarSet(std::initializer_list<Variable> vs) : vars_(vs) {}
  static VarSet all() {
    VarSet s;
    s.all_ = true;
    return s;
  }

  bool is_all() const { return all_; }
  bool empty() const { return !all_ && vars_.empty(); }
  bool contains(const Variable& x) const { return all_ || vars_.count(x) > 0; }
  const std::set<Variable>& elements() const { return vars_; }

  void insert(const Variable& x) {
    if (!all_) vars_.insert(x);
  }
  VarSet& operator|=(const VarSet& o);

  friend VarSet operator|(VarSet a, const VarSet& b) { return a |= b; }
  friend VarSet operator&(const VarSet& a, const VarSet& b);
  // a \ b, where removing from AllVariables only succeeds for b = AllVariables.
  friend VarSet operator-(const VarSet& a, const VarSet& b);
  bool intersects(const VarSet& o) const;
  bool subset_of(const VarSet& o) const;

  friend bool operator==(const VarSet& a, const VarSet& b) { return a.all_ == b.all_ && a.vars_ == b.vars_; }
  std::string str() const;

 private:
  bool all_ = false;
  std::set<Variable> vars_;
};

VarSet free_vars(const Expr& e);
VarSet free_vars(const Sequent& s);
VarSet bound_vars(const Expr& e);
VarSet must_bound_vars(const Expr& program);

// Variables occurring anywhere (free or bound).
std::set<Variable> all_vars(const Expr& e);
std::set<Variable> all_vars(const Sequent& s);

// Uninterpreted symbols (functions, predicates, program constants).
std::set<Symbol> signature(const Expr& e);
std::set<Symbol> signature(const Sequent& s);

// Largest dot index + 1 occurring in e (0 if no dots).
unsigned dot_count(const Expr& e);

}  // namespace usp
