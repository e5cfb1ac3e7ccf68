#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "usp/rational.hpp"

namespace usp {

// A program variable, optionally indexed (x_0) or primed (x').
struct Variable {
  std::string name;
  std::optional<unsigned> index;
  bool primed = false;

  Variable() = default;
  explicit Variable(std::string n, std::optional<unsigned> idx = std::nullopt, bool p = false)
      : name(std::move(n)), index(idx), primed(p) {}

  Variable base() const { return Variable(name, index, false); }
  Variable prime() const { return Variable(name, index, true); }
  Variable with_index(std::optional<unsigned> idx) const { return Variable(name, idx, primed); }

  std::string str() const;

  auto operator<=>(const Variable&) const = default;
  bool operator==(const Variable&) const = default;
};

enum class SymbolKind { Function, Predicate, Program };

// Applied symbols take exactly `arity` arguments; Wild symbols are nullary
// placeholders whose meaning may depend on every variable.
enum class Space { Applied, Wild };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Function;
  unsigned arity = 0;
  Space space = Space::Applied;

  std::string str() const;

  auto operator<=>(const Symbol&) const = default;
  bool operator==(const Symbol&) const = default;
};

// Same head: identical name and kind (arity mismatch is reported separately).
inline bool same_head(const Symbol& a, const Symbol& b) { return a.name == b.name && a.kind == b.kind; }

enum class Category { Term, Formula, Program };

enum class Op {
  // terms
  Var, Num, Dot, Func, Plus, Minus, Times, Divide, Power, Neg, Differential,
  // formulas
  True, False, Cmp, Pred, Not, And, Or, Imply, Equiv, Forall, Exists, Box, Diamond,
  // programs
  Assign, Test, Ode, Choice, Compose, Loop, ProgConst
};

enum class CmpOp { Eq, Ne, Ge, Gt, Le, Lt };

const char* cmp_text(CmpOp op);
CmpOp negate(CmpOp op);
CmpOp flip(CmpOp op);  // a op b  <=>  b flip(op) a

Category category_of(Op op);

class Node;

// Immutable expression handle (term, formula, or hybrid program). Copies share structure.
class Expr {
 public:
  Expr() = default;

  Op op() const;
  Category category() const { return category_of(op()); }
  bool is_term() const { return category() == Category::Term; }
  bool is_formula() const { return category() == Category::Formula; }
  bool is_program() const { return category() == Category::Program; }

  std::size_t arity() const;
  const Expr& child(std::size_t i) const;
  std::span<const Expr> children() const;

  // Var, Assign, Forall, Exists
  const Variable& var() const;
  // Num
  const Rational& num() const;
  // Dot
  unsigned dot_index() const;
  // Func, Pred, ProgConst
  const Symbol& symbol() const;
  // Cmp
  CmpOp cmp() const;
  // Ode: primed variables x' (stored as base names), right-hand sides, evolution domain
  std::span<const Variable> ode_vars() const;
  std::span<const Expr> ode_rhs() const;
  const Expr& ode_domain() const;

  std::size_t hash() const;
  bool valid() const { return node_ != nullptr; }

  // Structural (syntactic) equality, no alpha conversion, no normalization.
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  // Total order used for deterministic containers.
  friend bool operator<(const Expr& a, const Expr& b);

  std::string str() const;

 private:
  friend class ExprFactory;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

bool syntactic_equal(const Expr& a, const Expr& b);

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Raised on ill-formed construction (category mismatch, arity mismatch, bad ODE).
class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace mk {

// terms
Expr var(const Variable& x);
Expr var(const std::string& name);
Expr num(const Rational& value);
Expr num(long value);
Expr dot(unsigned index = 0);
Expr func(const Symbol& f, std::vector<Expr> args);
Expr plus(Expr a, Expr b);
Expr minus(Expr a, Expr b);
Expr times(Expr a, Expr b);
Expr divide(Expr a, Expr b);
Expr power(Expr a, Expr b);
Expr neg(Expr a);
Expr differential(Expr a);

// formulas
Expr tru();
Expr fls();
Expr cmp(CmpOp op, Expr a, Expr b);
Expr eq(Expr a, Expr b);
Expr ge(Expr a, Expr b);
Expr gt(Expr a, Expr b);
Expr pred(const Symbol& p, std::vector<Expr> args);
Expr lnot(Expr a);
Expr land(Expr a, Expr b);
Expr lor(Expr a, Expr b);
Expr imply(Expr a, Expr b);
Expr equiv(Expr a, Expr b);
Expr forall(const Variable& x, Expr body);
Expr exists(const Variable& x, Expr body);
Expr box(Expr program, Expr post);
Expr diamond(Expr program, Expr post);

// programs
Expr assign(const Variable& x, Expr value);
Expr test(Expr condition);
Expr ode(std::vector<Variable> vars, std::vector<Expr> rhs, Expr domain);
Expr choice(Expr a, Expr b);
Expr compose(Expr a, Expr b);
Expr loop(Expr body);
Expr prog(const Symbol& a);

// Rebuilds a node of the same shape with new children (and optionally new binder/var data).
Expr with_children(const Expr& e, std::vector<Expr> children);
Expr with_var(const Expr& e, const Variable& x);
Expr with_ode_vars(const Expr& e, std::vector<Variable> vars);

// Symbol helpers
Symbol function_symbol(const std::string& name, unsigned arity);
Symbol predicate_symbol(const std::string& name, unsigned arity);
Symbol program_symbol(const std::string& name);
Symbol wild_predicate(const std::string& name);
Symbol wild_function(const std::string& name);

}  // namespace mk

}  // namespace usp
