#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace usp {

// 'R / 'L, optionally with =="shape".
struct Locator {
  bool succ = true;
  std::optional<std::string> shape;
  std::optional<std::size_t> index;  // 0-based; from a numeric position (1, 2 ... or -1, -2 ...)
  friend bool operator==(const Locator&, const Locator&) = default;
};

enum class TacticKind { Atom, Seq, Branch, Repeat, Using, Skip, ExpandDef, ExpandAll, UsTactic, UseLemma };

struct Tactic;
using TacticPtr = std::shared_ptr<const Tactic>;

// Tactic syntax tree. Atom names are late-bound: the interpreter owns the vocabulary.
struct Tactic {
  TacticKind kind = TacticKind::Skip;
  std::string name;                  // Atom, ExpandDef, UseLemma
  std::vector<std::string> inputs;   // Atom string arguments, unparsed
  std::optional<Locator> locator;    // Atom
  std::vector<TacticPtr> children;   // Seq: 2, Repeat/Using: 1, Branch: n
  std::vector<std::optional<std::string>> labels;  // Branch, parallel to children
  std::vector<std::string> formulas;               // Using keep list, unparsed
  std::vector<std::pair<std::string, std::string>> pairs;  // US: what ~> repl, unparsed
  TacticPtr adaptation;                                     // UseLemma, may be null

  static TacticPtr atom(std::string name, std::vector<std::string> inputs = {}, std::optional<Locator> loc = {});
  static TacticPtr seq(TacticPtr a, TacticPtr b);
  static TacticPtr branch(std::vector<TacticPtr> children, std::vector<std::optional<std::string>> labels = {});
  static TacticPtr repeat(TacticPtr t);
  static TacticPtr using_(TacticPtr t, std::vector<std::string> keep);
  static TacticPtr skip();
  static TacticPtr expand(std::string name);
  static TacticPtr expand_all();
  static TacticPtr us(std::vector<std::pair<std::string, std::string>> pairs);
  static TacticPtr use_lemma(std::string name, TacticPtr adaptation = nullptr);
};

bool equal(const Tactic& a, const Tactic& b);

// Throws ParseError (usp/parser.hpp) with line and column.
TacticPtr parse_tactic(std::string_view text);

std::string print(const Tactic& t);

}  // namespace usp
