#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "usp/expr.hpp"
#include "usp/sequent.hpp"
#include "usp/usubst.hpp"
#include "usp/verdict.hpp"

namespace usp {

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace kernel {
struct KernelAccess;
}

// Conclusion plus open subgoals: validity of all subgoals implies validity of the conclusion.
// Values are created only by the functions in usp::kernel.
class Provable {
 public:
  const Sequent& conclusion() const { return conclusion_; }
  const std::vector<Sequent>& subgoals() const { return subgoals_; }
  // Names of the arithmetic oracles this derivation trusts (sorted, unique).
  const std::vector<std::string>& oracles() const { return oracles_; }
  bool closed() const { return subgoals_.empty(); }
  std::string str() const;

  friend bool operator==(const Provable& a, const Provable& b) {
    return a.conclusion_ == b.conclusion_ && a.subgoals_ == b.subgoals_;
  }

 private:
  friend struct kernel::KernelAccess;
  Provable(Sequent c, std::vector<Sequent> s, std::vector<std::string> o)
      : conclusion_(std::move(c)), subgoals_(std::move(s)), oracles_(std::move(o)) {}

  Sequent conclusion_;
  std::vector<Sequent> subgoals_;
  std::vector<std::string> oracles_;
};

enum class RuleKind {
  ImplyR, AndR, OrR, NotR, EquivR,
  ImplyL, AndL, OrL, NotL, EquivL,
  Close, CloseTrue, CloseFalse, Cut, HideL, HideR,
  Monotone, LoopInduction,
  DW, DI, DC, Dbx
};

const char* rule_name(RuleKind k);

// A rule application. `index` addresses the principal formula (antecedent for *L,
// succedent otherwise); Close uses index (antecedent) and other (succedent).
// `formula` carries the Cut formula, loop invariant, DC formula, or Darboux cofactor.
struct Rule {
  RuleKind kind = RuleKind::ImplyR;
  std::size_t index = 0;
  std::size_t other = 0;
  Expr formula;

  static Rule implyR(std::size_t i) { return {RuleKind::ImplyR, i, 0, {}}; }
  static Rule andR(std::size_t i) { return {RuleKind::AndR, i, 0, {}}; }
  static Rule orR(std::size_t i) { return {RuleKind::OrR, i, 0, {}}; }
  static Rule notR(std::size_t i) { return {RuleKind::NotR, i, 0, {}}; }
  static Rule equivR(std::size_t i) { return {RuleKind::EquivR, i, 0, {}}; }
  static Rule implyL(std::size_t i) { return {RuleKind::ImplyL, i, 0, {}}; }
  static Rule andL(std::size_t i) { return {RuleKind::AndL, i, 0, {}}; }
  static Rule orL(std::size_t i) { return {RuleKind::OrL, i, 0, {}}; }
  static Rule notL(std::size_t i) { return {RuleKind::NotL, i, 0, {}}; }
  static Rule equivL(std::size_t i) { return {RuleKind::EquivL, i, 0, {}}; }
  static Rule close(std::size_t ante, std::size_t succ) { return {RuleKind::Close, ante, succ, {}}; }
  static Rule close_true(std::size_t i) { return {RuleKind::CloseTrue, i, 0, {}}; }
  static Rule close_false(std::size_t i) { return {RuleKind::CloseFalse, i, 0, {}}; }
  static Rule cut(Expr c) { return {RuleKind::Cut, 0, 0, std::move(c)}; }
  static Rule hideL(std::size_t i) { return {RuleKind::HideL, i, 0, {}}; }
  static Rule hideR(std::size_t i) { return {RuleKind::HideR, i, 0, {}}; }
  static Rule monotone() { return {RuleKind::Monotone, 0, 0, {}}; }
  static Rule loop(Expr j, std::size_t i) { return {RuleKind::LoopInduction, i, 0, std::move(j)}; }
  static Rule dW(std::size_t i) { return {RuleKind::DW, i, 0, {}}; }
  static Rule dI(std::size_t i) { return {RuleKind::DI, i, 0, {}}; }
  static Rule dC(Expr c, std::size_t i) { return {RuleKind::DC, i, 0, std::move(c)}; }
  static Rule dbx(Expr g, std::size_t i) { return {RuleKind::Dbx, i, 0, std::move(g)}; }

  std::string str() const;
};

struct AxiomEntry {
  std::string name;
  Expr formula;
};

namespace kernel {

Provable start_proof(const Sequent& goal);

const std::vector<AxiomEntry>& axiom_table();
Provable lookup_axiom(const std::string& name);

// Replaces subgoal i by the rule's premises, in place and in order.
Provable apply_rule(const Provable& p, std::size_t i, const Rule& r);

// Replaces subgoal i by the subgoals of `sub`, whose conclusion must equal it exactly.
Provable apply_subderivation(const Provable& p, std::size_t i, const Provable& sub);

// Applies sigma to the conclusion and every subgoal; any clash aborts the whole call.
// Replacements with free variables are only admitted on closed Provables.
Provable usubst_provable(const Provable& p, const USubst& sigma);

// Renames x (and x') to the fresh y (and y') everywhere in p.
Provable uniform_rename(const Provable& p, const Variable& x, const Variable& y);

// Smallest-index variant of x that occurs nowhere in p.
Variable fresh_variable(const Provable& p, const Variable& x);

// Steps [x:=e]phi at succedent position `succ_pos` of subgoal i, by substitution when
// admissible and unambiguous, otherwise by renaming x to a fresh x_k and adding x=e.
Provable assign_forward(const Provable& p, std::size_t i, std::size_t succ_pos);

// Replaces the subformula at `path` inside the top-level formula `pos` of subgoal i,
// which must equal A, by B, given a closed fact ==> A<->B.
Provable rewrite_equiv(const Provable& p, std::size_t i, Position pos, const std::vector<std::size_t>& path,
                       const Provable& fact);

// Closed Provable for a real-arithmetic sequent certified valid by an oracle.
Provable admit_arithmetic(const Sequent& goal, const OracleVerdict& certificate);

bool is_closed(const Provable& p);

// Lie derivative of term t along the ODE program (throws KernelError when undefined).
Expr lie_derivative(const Expr& ode, const Expr& t);

}  // namespace kernel

}  // namespace usp
