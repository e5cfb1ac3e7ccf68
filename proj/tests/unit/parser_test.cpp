#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support/print.hpp"
#include "support/suites.hpp"
#include "support/gen.hpp"
#include "usp/archive.hpp"
#include "usp/parser.hpp"
#include "usp/printer.hpp"
#include "usp/static_semantics.hpp"
#include "usp/tactic.hpp"

using namespace usp;
using namespace usp::testing;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(USP_TEST_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Expr F(const char* s) { return parse_formula(s); }
Expr T(const char* s) { return parse_term(s); }
Expr P(const char* s) { return parse_program(s); }

Variable x("x");

}  // namespace

TEST(ExprParser, ProblemShape) {
  Expr f = F("x=2 -> [{ctrl;ode;}*]S(x)");
  Expr want = mk::imply(mk::eq(mk::var(x), mk::num(2)),
                        mk::box(mk::loop(mk::compose(mk::prog(mk::program_symbol("ctrl")), mk::prog(mk::program_symbol("ode")))),
                                mk::pred(mk::predicate_symbol("S", 1), {mk::var(x)})));
  EXPECT_EQ(f, want);
}

TEST(ExprParser, ImplicationIsRightNested) {
  Expr f = F("A__0() -> x>=0 -> [x:=x/y()^2;]x>=0");
  ASSERT_EQ(f.op(), Op::Imply);
  EXPECT_EQ(f.child(0), mk::pred(mk::predicate_symbol("A__0", 0), {}));
  ASSERT_EQ(f.child(1).op(), Op::Imply);
  Expr assign = f.child(1).child(1).child(0);
  ASSERT_EQ(assign.op(), Op::Assign);
  EXPECT_EQ(assign.child(0), mk::divide(mk::var(x), mk::power(mk::func(mk::function_symbol("y", 0), {}), mk::num(2))));
}

TEST(ExprParser, Precedence) {
  EXPECT_EQ(T("x-1-1"), mk::minus(mk::minus(mk::var(x), mk::num(1)), mk::num(1)));
  EXPECT_EQ(T("x+y*z"), mk::plus(mk::var(x), mk::times(mk::var("y"), mk::var("z"))));
  EXPECT_EQ(T("-x^2"), mk::neg(mk::power(mk::var(x), mk::num(2))));
  EXPECT_EQ(T("x/y*z"), mk::times(mk::divide(mk::var(x), mk::var("y")), mk::var("z")));
  EXPECT_EQ(F("!x>0 & y>0"), mk::land(mk::lnot(F("x>0")), F("y>0")));
  EXPECT_EQ(F("a>0 & b>0 | c>0"), mk::lor(mk::land(F("a>0"), F("b>0")), F("c>0")));
  EXPECT_EQ(F("a>0 | b>0 -> c>0"), mk::imply(mk::lor(F("a>0"), F("b>0")), F("c>0")));
  EXPECT_EQ(F("a>0 -> b>0 <-> c>0"), mk::equiv(mk::imply(F("a>0"), F("b>0")), F("c>0")));
  EXPECT_EQ(P("x:=1; y:=2; ++ z:=3;"), mk::choice(mk::compose(P("x:=1;"), P("y:=2;")), P("z:=3;")));
  EXPECT_EQ(P("{x:=1;}*"), mk::loop(P("x:=1;")));
}

TEST(ExprParser, UnicodeTokens) {
  EXPECT_EQ(F("x>0 ∧ ¬y<1 ∨ z=1 ↔ x>=0"), F("x>0 & !y<1 | z=1 <-> x>=0"));
  EXPECT_EQ(P("x:=1; ∪ x:=2;"), P("x:=1; ++ x:=2;"));
}

TEST(ExprParser, PositionedErrors) {
  using Pos = std::pair<std::size_t, std::size_t>;
  auto at = [](const char* s) -> Pos {
    try {
      parse_formula(s);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  EXPECT_EQ(at("x+"), (Pos{1, 3}));
  EXPECT_EQ(at("x>=0 -> -> y>0"), (Pos{1, 9}));
  EXPECT_EQ(at("[x:=1]x>0"), (Pos{1, 6}));
  EXPECT_EQ(at("\n  x >= (1"), (Pos{2, 10}));
  EXPECT_EQ(at("x >= 0 ~ 1"), (Pos{1, 8}));
}

TEST(ExprParser, SequentSyntax) {
  Sequent s = parse_sequent("x>=0, y>0 ==> x*y>=0");
  EXPECT_EQ(s.ante.size(), 2u);
  EXPECT_EQ(s.succ.size(), 1u);
  EXPECT_EQ(print(s), "x>=0, y>0 ==> x*y>=0");
  EXPECT_EQ(parse_sequent(print(s)), s);
  EXPECT_EQ(parse_sequent("==> x>0").ante.size(), 0u);
}

TEST(Printer, RoundTripRandomExpressions) {
  Tally t = roundtrip_generated(21, 1500);
  EXPECT_EQ(t.failed, 0u) << t.summary();
}

TEST(Printer, MinimalParentheses) {
  EXPECT_EQ(print(T("x+(y+z)")), "x+(y+z)");
  EXPECT_EQ(print(T("(x+y)+z")), "x+y+z");
  EXPECT_EQ(print(F("(a>0 -> b>0) -> c>0")), "(a>0->b>0)->c>0");
  EXPECT_EQ(parse_term(print(T("x+(y+z)"))), T("x+(y+z)"));
}

TEST(Archive, DoublingArchive) {
  Archive a = parse_archive(slurp("doubling.kyx"));
  ASSERT_EQ(a.entries.size(), 1u);
  const ArchiveEntry& e = a.entries[0];
  EXPECT_EQ(e.definitions.size(), 4u);
  for (const char* n : {"A", "S", "ctrl", "ode"}) EXPECT_NE(e.find_definition(n), nullptr) << n;
  EXPECT_EQ(e.problem, F("A(x) -> [{ctrl;ode;}*]S(x)"));
  EXPECT_EQ(e.program_variables, std::vector<Variable>{x});
}

TEST(Archive, IfDesugarsToCommentForm) {
  Archive a = parse_archive(slurp("doubling.kyx"));
  const Definition* ctrl = a.entries[0].find_definition("ctrl");
  ASSERT_TRUE(ctrl && ctrl->body);
  Expr expanded = parse_program("?S(x);x:=2*x; ++ ?!S(x);?true;", a.entries[0].symbols());
  EXPECT_EQ(*ctrl->body, expanded);
  Archive b = parse_archive(
      "Definitions Bool S(Real x); HP c ::= { if (S(x)) { x:=1; } else { x:=2; } }; End. "
      "ProgramVariables Real x; End. Problem [c;]S(x) End.");
  EXPECT_EQ(*b.entries[0].find_definition("c")->body,
            parse_program("?S(x);x:=1; ++ ?!S(x);x:=2;", b.entries[0].symbols()));
}

TEST(Archive, ListingArchiveEntries) {
  Archive a = parse_archive(slurp("decay_lemmas.kyx"));
  ASSERT_EQ(a.entries.size(), 4u);
  EXPECT_EQ(a.entries[0].name, "FIDE21/Exponential decay");
  EXPECT_EQ(a.entries[0].kind, EntryKind::Lemma);
  EXPECT_EQ(a.entries[3].kind, EntryKind::Theorem);
  const ArchiveEntry& guard = a.entries[1];
  EXPECT_EQ(guard.name, "FIDE21/Unsatisfied control guard");
  EXPECT_FALSE(guard.find_definition("S")->body.has_value());
  EXPECT_FALSE(guard.find_definition("P")->body.has_value());
  EXPECT_EQ(guard.problem, parse_formula("S(x) -> [?!S(x);]P(x)", guard.symbols()));
  EXPECT_EQ(guard.tactics.size(), 2u);
  // Every symbol used is declared, and every declaration is a symbol of the entry.
  for (const auto& en : a.entries) {
    std::set<std::string> declared;
    for (const auto& d : en.definitions) declared.insert(d.name);
    std::set<std::string> used;
    for (const auto& s : signature(en.problem)) used.insert(s.name);
    for (const auto& d : en.definitions)
      if (d.body)
        for (const auto& s : signature(*d.body)) used.insert(s.name);
    EXPECT_EQ(declared, used) << en.name;
  }
}

TEST(Archive, MinimalAndErrors) {
  Archive a = parse_archive("Definitions End. Problem x>=0 -> x>=0 End.");
  ASSERT_EQ(a.entries.size(), 1u);
  EXPECT_EQ(a.entries[0].problem, F("x>=0 -> x>=0"));
  try {
    parse_archive("Problem x>=0 Endd.");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 14u);
  }
  EXPECT_THROW(parse_archive("Problem S(x) End."), ParseError);
  EXPECT_THROW(parse_archive("Definitions Bool S(Real x) <-> x+1; End. Problem S(x) End."), ParseError);
  EXPECT_THROW(parse_archive("Lemma \"a\" Problem x>0 End. End. Lemma \"a\" Problem x>0 End. End."), ParseError);
}

TEST(Archive, AnnotationIsDiscarded) {
  auto syms = parse_archive(slurp("doubling.kyx")).entries[0].symbols();
  EXPECT_EQ(parse_formula("[ode{|^@|};]S(x)", syms), parse_formula("[ode;]S(x)", syms));
}

TEST(Archive, PrintRoundTrip) {
  for (const char* f : {"doubling.kyx", "decay_lemmas.kyx"}) {
    Archive a = parse_archive(slurp(f));
    Archive b = parse_archive(print(a));
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      EXPECT_EQ(a.entries[i].name, b.entries[i].name);
      EXPECT_EQ(a.entries[i].problem, b.entries[i].problem);
      ASSERT_EQ(a.entries[i].definitions.size(), b.entries[i].definitions.size());
      for (std::size_t k = 0; k < a.entries[i].definitions.size(); ++k) {
        EXPECT_EQ(a.entries[i].definitions[k].params, b.entries[i].definitions[k].params);
        EXPECT_EQ(a.entries[i].definitions[k].body.has_value(), b.entries[i].definitions[k].body.has_value());
        if (a.entries[i].definitions[k].body) EXPECT_EQ(*a.entries[i].definitions[k].body, *b.entries[i].definitions[k].body);
      }
      ASSERT_EQ(a.entries[i].tactics.size(), b.entries[i].tactics.size());
      for (std::size_t k = 0; k < a.entries[i].tactics.size(); ++k)
        EXPECT_TRUE(equal(*a.entries[i].tactics[k].tactic, *b.entries[i].tactics[k].tactic));
    }
  }
}

TEST(TacticParser, UsingScript) {
  TacticPtr t = parse_tactic("(orL('L)*; <(QE, skip)) using \"y=x|y>0 :: x*y<=y^2 :: nil\"; QE");
  ASSERT_EQ(t->kind, TacticKind::Seq);
  const Tactic& u = *t->children[0];
  ASSERT_EQ(u.kind, TacticKind::Using);
  EXPECT_EQ(u.formulas, (std::vector<std::string>{"y=x|y>0", "x*y<=y^2"}));
  const Tactic& body = *u.children[0];
  ASSERT_EQ(body.kind, TacticKind::Seq);
  EXPECT_EQ(body.children[0]->kind, TacticKind::Repeat);
  EXPECT_EQ(body.children[0]->children[0]->name, "orL");
  EXPECT_FALSE(body.children[0]->children[0]->locator->succ);
  ASSERT_EQ(body.children[1]->kind, TacticKind::Branch);
  EXPECT_EQ(body.children[1]->children[0]->name, "QE");
  EXPECT_EQ(body.children[1]->children[1]->kind, TacticKind::Skip);
  EXPECT_EQ(t->children[1]->name, "QE");
}

TEST(TacticParser, LabeledBranchAndLocators) {
  TacticPtr t = parse_tactic(
      "loop(\"S(x)\", 'R==\"[{ctrl;ode;}*]S(x)\"); <(\"Init\": expandAllDefs; QE, \"Post\": id, \"Step\": expand \"S\")");
  ASSERT_EQ(t->kind, TacticKind::Seq);
  const Tactic& loop = *t->children[0];
  EXPECT_EQ(loop.name, "loop");
  EXPECT_EQ(loop.inputs, std::vector<std::string>{"S(x)"});
  ASSERT_TRUE(loop.locator);
  EXPECT_TRUE(loop.locator->succ);
  EXPECT_EQ(loop.locator->shape, std::optional<std::string>("[{ctrl;ode;}*]S(x)"));
  const Tactic& br = *t->children[1];
  ASSERT_EQ(br.kind, TacticKind::Branch);
  EXPECT_EQ(br.labels, (std::vector<std::optional<std::string>>{"Init", "Post", "Step"}));
  EXPECT_EQ(br.children[0]->children[0]->kind, TacticKind::ExpandAll);
  EXPECT_EQ(br.children[2]->kind, TacticKind::ExpandDef);
  EXPECT_EQ(br.children[2]->name, "S");
  EXPECT_THROW(parse_tactic("<(\"a\": QE, \"a\": QE)"), ParseError);
}

TEST(TacticParser, NumericPositions) {
  TacticPtr a = parse_tactic("andL(-2)");
  ASSERT_TRUE(a->locator && a->locator->index);
  EXPECT_FALSE(a->locator->succ);
  EXPECT_EQ(*a->locator->index, 1u);
  TacticPtr b = parse_tactic("implyR(1)");
  EXPECT_TRUE(b->locator->succ);
  EXPECT_EQ(*b->locator->index, 0u);
  EXPECT_THROW(parse_tactic("implyR(0)"), ParseError);
  EXPECT_EQ(print(*a), "andL(-2)");
}

TEST(TacticParser, SmallForms) {
  EXPECT_EQ(parse_tactic("nil")->kind, TacticKind::Skip);
  EXPECT_EQ(parse_tactic("skip")->kind, TacticKind::Skip);
  TacticPtr us = parse_tactic("US({`S(x)~>x>=0 :: ode;~>{x'=-x} :: nil`})");
  ASSERT_EQ(us->kind, TacticKind::UsTactic);
  EXPECT_EQ(us->pairs.size(), 2u);
  EXPECT_EQ(us->pairs[0], (std::pair<std::string, std::string>{"S(x)", "x>=0"}));
  EXPECT_EQ(us->pairs[1], (std::pair<std::string, std::string>{"ode;", "{x'=-x}"}));
  TacticPtr ul = parse_tactic("useLemma(\"FIDE21/Exponential decay\", \"prop\")");
  ASSERT_EQ(ul->kind, TacticKind::UseLemma);
  EXPECT_EQ(ul->name, "FIDE21/Exponential decay");
  ASSERT_TRUE(ul->adaptation);
  EXPECT_EQ(ul->adaptation->name, "prop");
  EXPECT_EQ(parse_tactic("frobnicate(1)")->name, "frobnicate");  // late-bound
}

TEST(TacticParser, PositionedErrors) {
  auto col = [](const char* s) -> std::size_t {
    try {
      parse_tactic(s);
    } catch (const ParseError& e) {
      return e.column();
    }
    return 0;
  };
  EXPECT_EQ(col("implyR(1"), 9u);
  EXPECT_EQ(col("QE; ;"), 5u);
  EXPECT_EQ(col("expand"), 7u);
  EXPECT_EQ(col("\"x\""), 1u);
}

TEST(TacticParser, PrintRoundTrip) {
  Archive a = parse_archive(slurp("decay_lemmas.kyx"));
  for (const auto& e : a.entries)
    for (const auto& t : e.tactics) {
      std::string text = print(*t.tactic);
      EXPECT_TRUE(equal(*parse_tactic(text), *t.tactic)) << text;
    }
  const char* more[] = {"(orL('L)*; <(QE, skip)) using \"y=x|y>0 :: x*y<=y^2 :: nil\"; QE",
                        "implyR(1); loop(\"J(x)\", 1); <(\"Init\": expand \"J\"; QE, \"Step\": assignb(1), \"Post\": nil)",
                        "hideL(-1); assignb('R); QE"};
  for (const char* s : more) {
    TacticPtr t = parse_tactic(s);
    EXPECT_TRUE(equal(*parse_tactic(print(*t)), *t)) << s;
  }
}
