#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "usp/kernel.hpp"
#include "usp/usubst.hpp"

namespace usp {

enum class ProofErrorKind {
  Syntax,         // tactic or formula text does not parse
  UnknownTactic,
  Locator,        // no (or no unique) formula matches
  NotApplicable,  // the step does not fit the addressed formula
  Kernel,
  Clash,          // substitution not admissible
  Arithmetic,     // QE could not establish validity
  Definition,     // conflicting or ill-formed definition
  NotFound,       // unknown node, lemma, or symbol
  Lemma,          // lemma does not fit or fails validation
  Hidden,         // formula hidden by a using block
  NotOpen,        // node already has a step
  Branch,         // branch labels or counts do not match the open goals
  Reconcile,      // finalization could not reconcile substitutions
};

const char* error_kind_name(ProofErrorKind k);

class ProofError : public std::runtime_error {
 public:
  ProofError(ProofErrorKind kind, const std::string& message, std::optional<std::size_t> node = std::nullopt)
      : std::runtime_error(message), kind_(kind), node_(node) {}

  ProofErrorKind kind() const { return kind_; }
  std::optional<std::size_t> node() const { return node_; }
  void set_node(std::size_t n) {
    if (!node_) node_ = n;
  }
  // Present for Clash errors.
  std::optional<Symbol> clash_symbol;
  VarSet clash_taboo;
  VarSet clash_offending;

 private:
  ProofErrorKind kind_;
  std::optional<std::size_t> node_;
};

using NodeId = std::size_t;

// Re-derives a step on a substituted goal. Arguments: the goal the step must conclude and
// the substitution that produced it (to be applied to cut formulas, invariants, lemmas).
using StepFn = std::function<Provable(const Sequent&, const USubst&)>;

enum class StepKind {
  Rule,   // a kernel-checked Provable from the goal to the child goals
  Subst,  // child goal = goal with pending substitution pairs applied
  Using,  // a nested tree over the goal with some formulas abstracted away
};

class ProofTree;

struct StepRecord {
  StepKind kind = StepKind::Rule;
  std::string text;  // tactic that created the step; empty inside a larger tactic
  std::optional<Provable> provable;
  StepFn redo;
  std::vector<SubstPair> subst;
  std::shared_ptr<const ProofTree> inner;
  USubst hidden;  // Using: abstraction predicate ~> hidden formula
};

struct ProofNode {
  NodeId id = 0;
  std::optional<NodeId> parent;
  Sequent goal;
  std::string label;
  std::optional<StepRecord> step;
  std::vector<NodeId> children;

  bool open() const { return !step.has_value(); }
};

class ProofTree {
 public:
  explicit ProofTree(Sequent root);

  NodeId root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }
  const ProofNode& node(NodeId id) const;
  bool contains(NodeId id) const { return id < nodes_.size(); }

  // Open leaves in depth-first order.
  std::vector<NodeId> open_goals() const;
  std::vector<NodeId> open_below(NodeId id) const;
  bool closed() const { return open_goals().empty(); }

  // Records a step at an open node and creates one child per goal.
  std::vector<NodeId> attach(NodeId at, StepRecord step, const std::vector<Sequent>& goals,
                             const std::vector<std::string>& labels = {});
  void set_text(NodeId at, std::string text);

  // Substitution pairs recorded anywhere in the tree, nested trees included.
  std::vector<SubstPair> pending() const;

 private:
  std::vector<ProofNode> nodes_;
};

struct FinalizeResult {
  Provable provable;
  USubst substitution;  // all pending substitutions, composed
  // Uninterpreted symbols without a definition that remain in open subgoals (Prover::finalize).
  std::vector<Symbol> unresolved;
};

// Bottom-up reconciliation: every pending substitution is applied to every step, either by
// substituting the recorded Provable or, when the kernel refuses that, by re-deriving the
// step on the substituted goal. `global` adds pairs recorded outside the tree.
FinalizeResult finalize(const ProofTree& tree, const std::vector<SubstPair>& global = {});
// Reference strategy: every step is re-derived under the full substitution.
FinalizeResult finalize_eager(const ProofTree& tree, const std::vector<SubstPair>& global = {});

// A tactic that replays the tree from its root goal (same steps, same open goals).
std::string extract_tactic(const ProofTree& tree);

}  // namespace usp
