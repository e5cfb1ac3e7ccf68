#include "usp/static_semantics.hpp"

#include <algorithm>

namespace usp {

VarSet& VarSet::operator|=(const VarSet& o) {
  if (all_) return *this;
  if (o.all_) {
    all_ = true;
    vars_.clear();
    return *this;
  }
  vars_.insert(o.vars_.begin(), o.vars_.end());
  return *this;
}

VarSet operator&(const VarSet& a, const VarSet& b) {
  if (a.all_) return b;
  if (b.all_) return a;
  VarSet r;
  for (const auto& x : a.vars_)
    if (b.vars_.count(x)) r.vars_.insert(x);
  return r;
}

VarSet operator-(const VarSet& a, const VarSet& b) {
  if (b.all_) return VarSet{};
  if (a.all_) return a;
  VarSet r;
  for (const auto& x : a.vars_)
    if (!b.vars_.count(x)) r.vars_.insert(x);
  return r;
}

bool VarSet::intersects(const VarSet& o) const {
  if (empty() || o.empty()) return false;
  if (all_ || o.all_) return true;
  return std::any_of(vars_.begin(), vars_.end(), [&](const Variable& x) { return o.vars_.count(x) > 0; });
}

bool VarSet::subset_of(const VarSet& o) const {
  if (o.all_) return true;
  if (all_) return false;
  return std::all_of(vars_.begin(), vars_.end(), [&](const Variable& x) { return o.vars_.count(x) > 0; });
}

std::string VarSet::str() const {
  if (all_) return "{*}";
  std::string s = "{";
  bool first = true;
  for (const auto& x : vars_) {
    if (!first) s += ",";
    s += x.str();
    first = false;
  }
  return s + "}";
}

namespace {

VarSet primes_of(const VarSet& s) {
  if (s.is_all()) return s;
  VarSet r;
  for (const auto& x : s.elements()) r.insert(x.prime());
  return r;
}

VarSet ode_bound(const Expr& ode) {
  VarSet r;
  for (const auto& x : ode.ode_vars()) {
    r.insert(x);
    r.insert(x.prime());
  }
  return r;
}

}  // namespace

VarSet must_bound_vars(const Expr& p) {
  switch (p.op()) {
    case Op::Assign: return VarSet{p.var()};
    case Op::Test: return {};
    case Op::Ode: return ode_bound(p);
    case Op::Choice: return must_bound_vars(p.child(0)) & must_bound_vars(p.child(1));
    case Op::Compose: return must_bound_vars(p.child(0)) | must_bound_vars(p.child(1));
    case Op::Loop: return {};
    case Op::ProgConst: return {};
    default: return {};
  }
}

VarSet free_vars(const Expr& e) {
  switch (e.op()) {
    case Op::Var: return VarSet{e.var()};
    case Op::Num:
    case Op::Dot:
    case Op::True:
    case Op::False:
      return {};
    case Op::Func:
    case Op::Pred: {
      if (e.symbol().space == Space::Wild) return VarSet::all();
      VarSet r;
      for (const auto& a : e.children()) r |= free_vars(a);
      return r;
    }
    case Op::Differential: {
      VarSet inner = free_vars(e.child(0));
      return inner | primes_of(inner);
    }
    case Op::Forall:
    case Op::Exists:
      return free_vars(e.child(0)) - VarSet{e.var()};
    case Op::Box:
    case Op::Diamond:
      return free_vars(e.child(0)) | (free_vars(e.child(1)) - must_bound_vars(e.child(0)));
    case Op::Ode: {
      VarSet r;
      for (const auto& x : e.ode_vars()) r.insert(x);
      for (const auto& c : e.children()) r |= free_vars(c);
      return r;
    }
    case Op::Compose:
      return free_vars(e.child(0)) | (free_vars(e.child(1)) - must_bound_vars(e.child(0)));
    case Op::ProgConst: return VarSet::all();
    default: {
      VarSet r;
      for (const auto& c : e.children()) r |= free_vars(c);
      return r;
    }
  }
}

VarSet free_vars(const Sequent& s) {
  VarSet r;
  for (const auto& f : s.ante) r |= free_vars(f);
  for (const auto& f : s.succ) r |= free_vars(f);
  return r;
}

VarSet bound_vars(const Expr& e) {
  switch (e.op()) {
    case Op::Assign: return VarSet{e.var()};
    case Op::Ode: return ode_bound(e);
    case Op::ProgConst: return VarSet::all();
    case Op::Forall:
    case Op::Exists:
      return VarSet{e.var()} | bound_vars(e.child(0));
    default: {
      if (e.is_term()) return {};
      VarSet r;
      for (const auto& c : e.children()) r |= bound_vars(c);
      return r;
    }
  }
}

namespace {

void collect_vars(const Expr& e, std::set<Variable>& out) {
  switch (e.op()) {
    case Op::Var:
    case Op::Assign:
    case Op::Forall:
    case Op::Exists:
      out.insert(e.var());
      break;
    case Op::Ode:
      for (const auto& x : e.ode_vars()) {
        out.insert(x);
        out.insert(x.prime());
      }
      break;
    default:
      break;
  }
  for (const auto& c : e.children()) collect_vars(c, out);
}

void collect_symbols(const Expr& e, std::set<Symbol>& out) {
  if (e.op() == Op::Func || e.op() == Op::Pred || e.op() == Op::ProgConst) out.insert(e.symbol());
  for (const auto& c : e.children()) collect_symbols(c, out);
}

}  // namespace

std::set<Variable> all_vars(const Expr& e) {
  std::set<Variable> r;
  collect_vars(e, r);
  return r;
}

std::set<Variable> all_vars(const Sequent& s) {
  std::set<Variable> r;
  for (const auto& f : s.ante) collect_vars(f, r);
  for (const auto& f : s.succ) collect_vars(f, r);
  return r;
}

std::set<Symbol> signature(const Expr& e) {
  std::set<Symbol> r;
  collect_symbols(e, r);
  return r;
}

std::set<Symbol> signature(const Sequent& s) {
  std::set<Symbol> r;
  for (const auto& f : s.ante) collect_symbols(f, r);
  for (const auto& f : s.succ) collect_symbols(f, r);
  return r;
}

unsigned dot_count(const Expr& e) {
  unsigned n = e.op() == Op::Dot ? e.dot_index() + 1 : 0;
  for (const auto& c : e.children()) n = std::max(n, dot_count(c));
  return n;
}

}  // namespace usp
