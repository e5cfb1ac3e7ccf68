#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "usp/expr.hpp"
#include "usp/parser.hpp"
#include "usp/tactic.hpp"
#include "usp/usubst.hpp"

namespace usp {

enum class DefKind { Bool, Real, HP };

struct Definition {
  std::string name;
  DefKind kind = DefKind::Bool;
  std::vector<Variable> params;
  std::optional<Expr> body;  // over the parameter names; absent when uninterpreted

  Symbol symbol() const;
  // Body with parameter k replaced by the dot ._k, ready for a USubst pair.
  std::optional<Expr> replacement() const;
};

struct TacticEntry {
  std::string name;
  TacticPtr tactic;
};

enum class EntryKind { Lemma, Theorem };

struct ArchiveEntry {
  EntryKind kind = EntryKind::Theorem;
  std::string name;
  std::vector<Definition> definitions;
  std::vector<Variable> program_variables;
  Expr problem;
  std::vector<TacticEntry> tactics;

  SymbolTable symbols() const;
  const Definition* find_definition(const std::string& name) const;
};

struct Archive {
  std::vector<ArchiveEntry> entries;
  const ArchiveEntry* find(const std::string& name) const;
};

// Entries wrapped in Lemma/Theorem blocks, or one bare Definitions/ProgramVariables/Problem
// body (named ""). Throws ParseError on syntax errors and undeclared symbols.
Archive parse_archive(std::string_view text);

std::string print(const ArchiveEntry& e);
std::string print(const Archive& a);

}  // namespace usp
