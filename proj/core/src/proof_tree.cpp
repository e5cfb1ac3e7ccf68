#include <set>

#include "usp/printer.hpp"
#include "usp/proof.hpp"
#include "usp/registry.hpp"

namespace usp {

const char* error_kind_name(ProofErrorKind k) {
  switch (k) {
    case ProofErrorKind::Syntax: return "syntax";
    case ProofErrorKind::UnknownTactic: return "unknown-tactic";
    case ProofErrorKind::Locator: return "locator";
    case ProofErrorKind::NotApplicable: return "not-applicable";
    case ProofErrorKind::Kernel: return "kernel";
    case ProofErrorKind::Clash: return "clash";
    case ProofErrorKind::Arithmetic: return "arithmetic";
    case ProofErrorKind::Definition: return "definition";
    case ProofErrorKind::NotFound: return "not-found";
    case ProofErrorKind::Lemma: return "lemma";
    case ProofErrorKind::Hidden: return "hidden";
    case ProofErrorKind::NotOpen: return "not-open";
    case ProofErrorKind::Branch: return "branch";
    case ProofErrorKind::Reconcile: return "reconcile";
  }
  return "?";
}

ProofTree::ProofTree(Sequent root) {
  ProofNode n;
  n.goal = std::move(root);
  nodes_.push_back(std::move(n));
}

const ProofNode& ProofTree::node(NodeId id) const {
  if (id >= nodes_.size()) throw ProofError(ProofErrorKind::NotFound, "no node " + std::to_string(id));
  return nodes_[id];
}

std::vector<NodeId> ProofTree::open_below(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const ProofNode& n = node(stack.back());
    stack.pop_back();
    if (n.open()) {
      out.push_back(n.id);
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<NodeId> ProofTree::open_goals() const { return open_below(root()); }

std::vector<NodeId> ProofTree::attach(NodeId at, StepRecord step, const std::vector<Sequent>& goals,
                                      const std::vector<std::string>& labels) {
  if (!node(at).open()) throw ProofError(ProofErrorKind::NotOpen, "node " + std::to_string(at) + " is not open", at);
  std::vector<NodeId> kids;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    ProofNode n;
    n.id = nodes_.size();
    n.parent = at;
    n.goal = goals[i];
    if (i < labels.size()) n.label = labels[i];
    kids.push_back(n.id);
    nodes_.push_back(std::move(n));
  }
  nodes_[at].step = std::move(step);
  nodes_[at].children = kids;
  return kids;
}

void ProofTree::set_text(NodeId at, std::string text) {
  if (!node(at).step) return;
  nodes_[at].step->text = std::move(text);
}

std::vector<SubstPair> ProofTree::pending() const {
  std::vector<SubstPair> out;
  for (const auto& n : nodes_) {
    if (!n.step) continue;
    for (const auto& p : n.step->subst) out.push_back(p);
    if (n.step->inner) {
      auto more = n.step->inner->pending();
      out.insert(out.end(), more.begin(), more.end());
    }
  }
  return out;
}

namespace {

USubst restrict_to(const USubst& sigma, const std::set<Symbol>& sig) {
  USubst out;
  for (const auto& p : sigma.pairs()) {
    for (const auto& s : sig) {
      if (same_head(s, p.what)) {
        out.add(p.what, p.repl);
        break;
      }
    }
  }
  return out;
}

std::set<Symbol> provable_signature(const Provable& p) {
  std::set<Symbol> sig = signature(p.conclusion());
  for (const auto& g : p.subgoals()) {
    auto more = signature(g);
    sig.insert(more.begin(), more.end());
  }
  return sig;
}

Sequent apply(const USubst& sigma, const Sequent& s, NodeId at) {
  if (sigma.empty()) return s;
  try {
    return usubst_sequent(sigma, s);
  } catch (const ClashError& e) {
    ProofError err(ProofErrorKind::Clash, std::string("reconciling substitution: ") + e.what(), at);
    err.clash_symbol = e.symbol();
    err.clash_taboo = e.taboo();
    err.clash_offending = e.offending();
    throw err;
  }
}

class Finalizer {
 public:
  Finalizer(const USubst& sigma, bool eager) : sigma_(sigma), eager_(eager) {}

  Provable run(const ProofTree& t, NodeId id) {
    const ProofNode& n = t.node(id);
    Sequent goal = apply(sigma_, n.goal, id);
    if (n.open()) return kernel::start_proof(goal);
    const StepRecord& s = *n.step;
    switch (s.kind) {
      case StepKind::Subst: {
        Provable r = run(t, n.children.at(0));
        if (r.conclusion() != goal)
          throw ProofError(ProofErrorKind::Reconcile,
                           "substitution step does not reconcile: " + r.conclusion().str() + " vs " + goal.str(), id);
        return r;
      }
      case StepKind::Rule: {
        Provable p = step_provable(s, goal, id);
        return splice(t, n, p);
      }
      case StepKind::Using: {
        Provable inner = run(*s.inner, s.inner->root());
        USubst show;
        for (const auto& pr : s.hidden.pairs()) show.add(pr.what, sigma_.empty() ? pr.repl : usubst_expr(sigma_, pr.repl));
        Provable p = inner;
        try {
          p = kernel::usubst_provable(inner, show);
        } catch (const std::exception& e) {
          throw ProofError(ProofErrorKind::Reconcile, std::string("cannot restore hidden formulas: ") + e.what(), id);
        }
        if (p.conclusion() != goal)
          throw ProofError(ProofErrorKind::Reconcile, "using block does not reconcile with " + goal.str(), id);
        return splice(t, n, p);
      }
    }
    throw ProofError(ProofErrorKind::Reconcile, "unknown step kind", id);
  }

 private:
  Provable step_provable(const StepRecord& s, const Sequent& goal, NodeId id) {
    const Provable& recorded = *s.provable;
    if (sigma_.empty()) return recorded;
    USubst local = restrict_to(sigma_, provable_signature(recorded));
    if (local.empty()) return recorded;
    if (!eager_) {
      try {
        return kernel::usubst_provable(recorded, local);
      } catch (const KernelError&) {
        // open Provable with free variables in the replacement: re-derive below
      } catch (const ClashError& e) {
        if (!s.redo) throw ProofError(ProofErrorKind::Clash, std::string("reconciling substitution: ") + e.what(), id);
      }
    }
    if (!s.redo) throw ProofError(ProofErrorKind::Reconcile, "step cannot be re-derived under " + local.str(), id);
    try {
      return s.redo(goal, sigma_);
    } catch (const ProofError&) {
      throw;
    } catch (const ClashError& e) {
      ProofError err(ProofErrorKind::Clash, std::string("re-deriving step: ") + e.what(), id);
      err.clash_symbol = e.symbol();
      throw err;
    } catch (const std::exception& e) {
      throw ProofError(ProofErrorKind::Reconcile, std::string("re-deriving step: ") + e.what(), id);
    }
  }

  Provable splice(const ProofTree& t, const ProofNode& n, Provable p) {
    if (p.subgoals().size() != n.children.size())
      throw ProofError(ProofErrorKind::Reconcile, "step has " + std::to_string(p.subgoals().size()) + " subgoals but " +
                                                      std::to_string(n.children.size()) + " children", n.id);
    for (std::size_t k = n.children.size(); k-- > 0;) {
      Provable sub = run(t, n.children[k]);
      if (sub.conclusion() != p.subgoals()[k])
        throw ProofError(ProofErrorKind::Reconcile,
                         "child " + std::to_string(n.children[k]) + " concludes " + sub.conclusion().str() +
                             " but the step needs " + p.subgoals()[k].str(),
                         n.id);
      p = kernel::apply_subderivation(p, k, sub);
    }
    return p;
  }

  const USubst& sigma_;
  bool eager_;
};

FinalizeResult finalize_with(const ProofTree& tree, const std::vector<SubstPair>& global, bool eager) {
  std::vector<SubstPair> all = global;
  auto more = tree.pending();
  all.insert(all.end(), more.begin(), more.end());
  USubst sigma;
  try {
    sigma = close_substitution(all);
  } catch (const DefinitionError& e) {
    throw ProofError(ProofErrorKind::Definition, e.what());
  } catch (const ClashError& e) {
    throw ProofError(ProofErrorKind::Clash, std::string("composing substitutions: ") + e.what());
  }
  Finalizer f(sigma, eager);
  Provable p = f.run(tree, tree.root());
  return {p, sigma};
}

std::string quote(const std::string& s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += c;
  }
  return r + "\"";
}

void frontier(const ProofTree& t, NodeId id, std::vector<NodeId>& out) {
  for (NodeId c : t.node(id).children) {
    const ProofNode& k = t.node(c);
    if (k.step && k.step->text.empty()) {
      frontier(t, c, out);
    } else {
      out.push_back(c);
    }
  }
}

std::string script(const ProofTree& t, NodeId id) {
  const ProofNode& n = t.node(id);
  if (n.open()) return "";
  std::string out = n.step->text;
  std::vector<NodeId> next;
  frontier(t, id, next);
  std::vector<std::string> parts;
  bool any = false;
  for (NodeId c : next) {
    parts.push_back(script(t, c));
    any = any || !parts.back().empty();
  }
  if (out.empty()) {
    if (next.size() == 1) return parts[0];
    out = "skip";
  }
  if (!any) return out;
  if (next.size() == 1) return out + "; " + parts[0];
  std::set<std::string> labels;
  for (NodeId c : next)
    if (!t.node(c).label.empty()) labels.insert(t.node(c).label);
  bool labeled = labels.size() == next.size();
  out += "; <(";
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (i) out += ", ";
    if (labeled) out += quote(t.node(next[i]).label) + ": ";
    out += parts[i].empty() ? "skip" : parts[i];
  }
  return out + ")";
}

}  // namespace

FinalizeResult finalize(const ProofTree& tree, const std::vector<SubstPair>& global) {
  return finalize_with(tree, global, false);
}

FinalizeResult finalize_eager(const ProofTree& tree, const std::vector<SubstPair>& global) {
  return finalize_with(tree, global, true);
}

std::string extract_tactic(const ProofTree& tree) {
  std::string s = script(tree, tree.root());
  return s.empty() ? "nil" : s;
}

}  // namespace usp
