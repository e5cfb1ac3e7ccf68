#include <gtest/gtest.h>

#include <sys/stat.h>

#include <filesystem>
#include <fstream>

#include "support/print.hpp"
#include "support/gen.hpp"
#include "support/lp.hpp"
#include "support/semantics.hpp"
#include "support/suites.hpp"
#include "usp/arith.hpp"
#include "usp/parser.hpp"

using namespace usp;
using namespace usp::testing;
namespace fs = std::filesystem;

namespace {

Sequent S(const char* s) { return parse_sequent(s); }
VerdictStatus st(const OracleVerdict& v) { return v.status(); }

const std::vector<Variable> kXY{Variable("x"), Variable("y")};

// Exhaustive check of a Valid/NotValid verdict against the reference semantics on a grid.
void check_verdict(const OracleVerdict& v, const Sequent& s, const std::vector<Rational>& values) {
  if (v.status() == VerdictStatus::Valid) {
    for_each_state(kXY, values, [&](const State& st) {
      auto t = holds(s, st);
      if (t) EXPECT_TRUE(*t) << v.oracle_name() << " claims " << print(s) << " but it fails at x="
                             << to_string(value_of(st, kXY[0])) << ", y=" << to_string(value_of(st, kXY[1]));
      return !t || *t;
    });
  } else if (v.status() == VerdictStatus::NotValid && !v.counterexample().empty()) {
    auto t = holds(s, v.counterexample());
    EXPECT_EQ(t, std::optional<bool>(false)) << v.oracle_name() << " counterexample for " << print(s);
  }
}

}  // namespace

TEST(Ground, Examples) {
  EXPECT_EQ(st(decide_ground(S("==> 1>=0"))), VerdictStatus::Valid);
  EXPECT_EQ(st(decide_ground(S("==> 2=3"))), VerdictStatus::NotValid);
  EXPECT_EQ(st(decide_ground(S("1>0 ==> 1/2>=1/3"))), VerdictStatus::Valid);
  EXPECT_EQ(decide_ground(S("==> 1>=0")).oracle(), OracleKind::BuiltinGround);
  // guarded division: an atom dividing by zero is false
  EXPECT_EQ(st(decide_ground(S("==> 1/0>=0"))), VerdictStatus::NotValid);
  EXPECT_EQ(st(decide_ground(S("1/0>=0 ==> 2=3"))), VerdictStatus::Valid);
  EXPECT_THROW(decide_ground(S("==> x>=0")), ArithError);
  EXPECT_THROW(decide_ground(S("==> c()>=0")), ArithError);
}

TEST(Linear, Examples) {
  EXPECT_EQ(st(decide_linear(S("x=2 ==> x>=1"))), VerdictStatus::Valid);
  EXPECT_EQ(st(decide_linear(S("x>=1 ==> x>=-1"))), VerdictStatus::Valid);
  OracleVerdict v = decide_linear(S("x<1 ==> x>=1"));
  ASSERT_EQ(st(v), VerdictStatus::NotValid);
  EXPECT_EQ(holds(S("x<1 ==> x>=1"), v.counterexample()), std::optional<bool>(false));
  EXPECT_EQ(st(decide_linear(S("x>=0 ==> x*x>=0"))), VerdictStatus::Unknown);
  EXPECT_EQ(st(decide_linear(S("x!=1, x>=1 ==> x>1"))), VerdictStatus::Valid);
  EXPECT_EQ(st(decide_linear(S("x>=1 ==> 1+(x-1)/2>=1"))), VerdictStatus::Valid);
}

TEST(Heuristic, Examples) {
  EXPECT_EQ(st(decide_heuristic(S("y>0 ==> x^2*y>=0"))), VerdictStatus::Valid);
  EXPECT_EQ(st(decide_heuristic(S("x>=0, y!=0 ==> x/y^2>=0"))), VerdictStatus::Valid);
  EXPECT_EQ(st(decide_heuristic(S("x>=1 ==> 1+(x-1)/2>=1"))), VerdictStatus::Valid);
  EXPECT_EQ(st(decide_heuristic(S("x=2 ==> x^2>=4"))), VerdictStatus::Valid);
  EXPECT_EQ(st(decide_heuristic(S("==> x^4+y^2>=0"))), VerdictStatus::Valid);
  // without y!=0 the quotient is unguarded: x=1, y=0 falsifies
  EXPECT_NE(st(decide_heuristic(S("x>=0 ==> x/y^2>=0"))), VerdictStatus::Valid);
}

TEST(Cascade, Examples) {
  EXPECT_EQ(qe(S("==> 1>=0")).oracle(), OracleKind::BuiltinGround);
  EXPECT_EQ(qe(S("x=2 ==> x>=1")).oracle(), OracleKind::BuiltinLinear);
  OracleVerdict h = qe(S("y>0 ==> x^2*y>=0"));
  EXPECT_TRUE(h.valid());
  EXPECT_EQ(h.oracle(), OracleKind::BuiltinHeuristic);
  EXPECT_TRUE(qe(S("x>=0, y!=0 ==> x/y^2>=0")).valid());
  EXPECT_EQ(st(qe(S("==> x^3*y>=x*y^5"))), VerdictStatus::Unknown);
  // opaque atoms are abstracted, never refuted
  EXPECT_TRUE(qe(S("J(x) ==> J(x)")).valid());
  EXPECT_EQ(st(qe(S("J(x) ==> x>=1"))), VerdictStatus::Unknown);
  ArithOracle o;
  o.qe(S("x=2 ==> x>=1"));
  o.qe(S("x=2 ==> x>=1"));
  EXPECT_EQ(o.cache_size(), 1u);
}

// Every stage on every ground sequent over the grid agrees with exact evaluation.
TEST(GroundProperty, ExhaustiveCorpus) {
  Tally t = ground_corpus();
  EXPECT_EQ(t.failed, 0u) << t.summary();
  EXPECT_GE(t.checked, 2000u);
}

// Valid verdicts hold on the whole grid; counterexamples falsify.
TEST(ArithProperty, SoundAgainstBruteForce) {
  GenConfig cfg;
  cfg.vars = kXY;
  cfg.symbols = false;
  Gen g(51, cfg);
  std::vector<Rational> vals = grid(2, 4);
  int valid = 0, refuted = 0;
  for (int i = 0; i < 2000; ++i) {
    std::vector<Expr> ante;
    for (int k = g.uniform(0, 2); k > 0; --k) ante.push_back(g.arith_formula(1));
    Sequent s(ante, {g.arith_formula(1)});
    for (const auto& v : {decide_linear(s), decide_heuristic(s), qe(s)}) {
      check_verdict(v, s, vals);
      valid += v.valid();
      refuted += st(v) == VerdictStatus::NotValid;
    }
  }
  EXPECT_GE(valid, 100);
  EXPECT_GE(refuted, 100);
}

TEST(ArithProperty, HeuristicOnQuotients) {
  // Sign analysis of quotients with guarded denominators.
  GenConfig cfg;
  cfg.vars = kXY;
  Gen g(52, cfg);
  std::vector<Rational> vals = grid(2, 4);
  static const char* hyps[] = {"x>=0", "x>0", "y!=0", "y>0", "y<0", "x<=0", "x=1"};
  static const char* goals[] = {"x/y^2>=0", "x/y>=0", "x*y^2>=0", "x^2/y>0", "-x/y^2<=0", "x/(y^2+1)>=0"};
  for (int i = 0; i < 300; ++i) {
    std::vector<Expr> ante;
    for (int k = g.uniform(0, 3); k > 0; --k) ante.push_back(parse_formula(hyps[g.uniform(0, 6)]));
    Sequent s(ante, {parse_formula(goals[g.uniform(0, 5)])});
    check_verdict(decide_heuristic(s), s, vals);
  }
}

TEST(ArithProperty, LinearMatchesVertexOracle) {
  Tally t = vertex_agreement(53, 200);
  EXPECT_EQ(t.failed, 0u) << t.summary();
  EXPECT_EQ(t.checked, 200u);
}

TEST(ArithProperty, ExtraHypothesesKeepValidity) {
  GenConfig cfg;
  cfg.vars = kXY;
  cfg.symbols = false;
  Gen g(54, cfg);
  int checked = 0;
  for (int i = 0; i < 3000 && checked < 300; ++i) {
    Sequent s({g.arith_formula(1)}, {g.arith_formula(1)});
    if (!qe(s).valid()) continue;
    ++checked;
    Sequent more = s;
    more.ante.insert(more.ante.begin() + g.uniform(0, 1), g.arith_formula(1));
    EXPECT_NE(st(qe(more)), VerdictStatus::NotValid) << print(more);
  }
  EXPECT_GE(checked, 300);
}

namespace {

class FakeSolver : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("usp-smt-" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string script(const std::string& name, const std::string& body) {
    fs::path p = dir_ / name;
    std::ofstream(p) << "#!/bin/sh\n" << body << "\n";
    ::chmod(p.c_str(), 0755);
    return p.string();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(FakeSolver, UnsatIsValid) {
  std::string s = script("unsat", "cat > /dev/null; echo unsat");
  OracleVerdict v = smt_check(S("y>0 ==> x^2*y>=0"), std::chrono::milliseconds(5000), s);
  EXPECT_TRUE(v.valid());
  EXPECT_EQ(v.oracle(), OracleKind::ExternalSMT);
  EXPECT_EQ(v.solver(), s);
  EXPECT_TRUE(decide_heuristic(S("y>0 ==> x^2*y>=0")).valid());
}

TEST_F(FakeSolver, SatGivesCheckedModel) {
  std::string s = script("sat", "cat > /dev/null; echo sat; echo '((|x| (/ 1.0 2.0)))'");
  OracleVerdict v = smt_check(S("==> x^2>=x"), std::chrono::milliseconds(5000), s);
  ASSERT_EQ(st(v), VerdictStatus::NotValid);
  EXPECT_EQ(v.counterexample().at(Variable("x")), Rational(1, 2));
  // a model that does not falsify the goal is not believed
  std::string liar = script("liar", "cat > /dev/null; echo sat; echo '((|x| 2.0))'");
  EXPECT_EQ(st(smt_check(S("==> x^2>=x"), std::chrono::milliseconds(5000), liar)), VerdictStatus::Unknown);
}

TEST_F(FakeSolver, TimeoutsAndCrashes) {
  std::string slow = script("slow", "cat > /dev/null; sleep 5; echo unsat");
  auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(st(smt_check(S("==> x>=0"), std::chrono::milliseconds(200), slow)), VerdictStatus::Unknown);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(3));
  EXPECT_EQ(st(smt_check(S("==> x>=0"), std::chrono::milliseconds(0), slow)), VerdictStatus::Unknown);
  std::string crash = script("crash", "cat > /dev/null; exit 3");
  EXPECT_THROW(smt_check(S("==> x>=0"), std::chrono::milliseconds(5000), crash), ArithError);
  std::string garbage = script("garbage", "cat > /dev/null; echo banana");
  EXPECT_THROW(smt_check(S("==> x>=0"), std::chrono::milliseconds(5000), garbage), ArithError);
  EXPECT_THROW(smt_check(S("==> x>=0"), std::chrono::milliseconds(5000), (dir_ / "missing").string()), ArithError);
  std::string unknown = script("unknown", "cat > /dev/null; echo unknown");
  EXPECT_EQ(st(smt_check(S("==> x>=0"), std::chrono::milliseconds(5000), unknown)), VerdictStatus::Unknown);
}

TEST_F(FakeSolver, CascadeUsesSolverLast) {
  fs::path log = dir_ / "calls";
  std::string rec = script("rec", "cat >> " + log.string() + "; echo unsat");
  ArithOracle o(ArithConfig{rec, std::chrono::milliseconds(5000)});
  EXPECT_EQ(o.qe(S("==> 1>=0")).oracle(), OracleKind::BuiltinGround);
  EXPECT_EQ(o.qe(S("x=2 ==> x>=1")).oracle(), OracleKind::BuiltinLinear);
  EXPECT_FALSE(fs::exists(log));  // decided before the solver stage
  OracleVerdict v = o.qe(S("==> x^3*y>=x*y^5"));
  EXPECT_EQ(v.oracle(), OracleKind::ExternalSMT);
  EXPECT_TRUE(fs::exists(log));
}

TEST(SmtEncode, Script) {
  std::string s = smt_encode(S("x>=0, y!=0 ==> x/y^2>=0"));
  EXPECT_NE(s.find("(set-logic QF_NRA)"), std::string::npos);
  EXPECT_NE(s.find("(declare-fun |x| () Real)"), std::string::npos);
  EXPECT_NE(s.find("(declare-fun |y| () Real)"), std::string::npos);
  EXPECT_NE(s.find("(assert (not"), std::string::npos);
  EXPECT_NE(s.find("(not (= (* |y| |y|) 0.0))"), std::string::npos);  // division guard
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
  EXPECT_NE(smt_encode(S("==> f(x)>0")).find("QF_UFNRA"), std::string::npos);
  EXPECT_NE(smt_encode(S("==> x>=-0.5")).find("(- (/ 1.0 2.0))"), std::string::npos);
}
