#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "usp/archive.hpp"
#include "usp/arith.hpp"
#include "usp/proof.hpp"
#include "usp/registry.hpp"
#include "usp/tactic.hpp"

namespace usp {

class LemmaStore;

// One-sided matching: a substitution over the uninterpreted symbols of `pattern` with
// usubst(result, pattern) == target. Throws ProofError(Lemma) when none exists.
USubst match(const Sequent& pattern, const Sequent& target);
USubst match(const Expr& pattern, const Expr& target);

// Parses "lhs~>rhs" pairs as written in US tactics. Argument variables on the left become dots.
USubst parse_substitution(const std::vector<std::pair<std::string, std::string>>& pairs, const SymbolTable& symbols);

// A proof in progress: tree, definitions, and the services tactics need.
// Every mutating call is transactional: on error the state is unchanged.
class Prover {
 public:
  explicit Prover(Sequent goal, DefinitionRegistry defs = {}, std::shared_ptr<LemmaStore> lemmas = nullptr,
                  std::shared_ptr<ArithOracle> oracle = nullptr);
  static Prover for_entry(const ArchiveEntry& entry, std::shared_ptr<LemmaStore> lemmas = nullptr,
                          std::shared_ptr<ArithOracle> oracle = nullptr);

  const ProofTree& tree() const { return state_.tree; }
  const DefinitionRegistry& registry() const { return state_.defs; }
  SymbolTable symbols() const;
  ArithOracle& oracle() const { return *oracle_; }
  const std::shared_ptr<LemmaStore>& lemmas() const { return lemmas_; }

  std::vector<NodeId> run(NodeId at, const Tactic& t);
  std::vector<NodeId> run(NodeId at, std::string_view tactic);

  enum class ExpandScope { Goal, Everywhere };
  // Goal: one-step expansion at `at`. Everywhere: at every open goal mentioning the symbol.
  void expand(NodeId at, const std::string& name, ExpandScope scope = ExpandScope::Goal);
  void expand_all(NodeId at);
  // Gives an uninterpreted symbol a body (dot form: ._k is argument k).
  // ExpandOpenGoals also substitutes it into the whole proof at finalization and expands it at
  // every open goal; RegistryOnly just makes it available to expand (used when replaying a
  // recorded tactic, which carries its own expand steps).
  enum class DefineEffect { ExpandOpenGoals, RegistryOnly };
  void define(const std::string& name, const Expr& repl, DefineEffect effect = DefineEffect::ExpandOpenGoals);
  void define(const std::string& name, std::string_view repl_text,
              DefineEffect effect = DefineEffect::ExpandOpenGoals);

  std::vector<NodeId> use_lemma(NodeId at, const std::string& name, TacticPtr adaptation = nullptr);
  std::vector<NodeId> using_block(NodeId at, const Tactic& t, const std::vector<Expr>& keep);

  FinalizeResult finalize() const;
  FinalizeResult finalize_eager() const;
  std::string extract_tactic() const { return usp::extract_tactic(state_.tree); }

  // Independent proof of the goal at `at`; once closed it is applied there.
  std::size_t start_sublemma(NodeId at);
  Prover& sublemma(std::size_t id);
  // True when the sub-lemma was closed and applied to its originating node.
  bool finish_sublemma(std::size_t id);

  // Goals after applying every definition made so far.
  std::vector<SubstPair> global_substitution() const { return state_.globals; }

 private:
  struct State {
    ProofTree tree;
    DefinitionRegistry defs;
    std::vector<SubstPair> globals;
  };
  struct Sub {
    NodeId origin;
    std::shared_ptr<Prover> prover;
    bool applied = false;
  };

  template <typename F>
  auto transact(F&& f);

  friend class Interpreter;

  State state_;
  std::shared_ptr<LemmaStore> lemmas_;
  std::shared_ptr<ArithOracle> oracle_;
  std::vector<Sub> subs_;
};

}  // namespace usp
