#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "usp/archive.hpp"
#include "usp/arith.hpp"
#include "usp/lemma_store.hpp"
#include "usp/parser.hpp"
#include "usp/printer.hpp"
#include "usp/prover.hpp"
#include "usp/usubst.hpp"

using namespace usp;

namespace {

std::string slurp(const char* name) {
  std::ifstream in(std::string(USP_BENCH_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// x_1 + ... + x_n >= 0 style chains, so sizes scale linearly.
std::string chain(int n, const char* op) {
  std::string s = "x0";
  for (int i = 1; i < n; ++i) s += std::string(op) + "x" + std::to_string(i);
  return s;
}

}  // namespace

static void BM_ParseArchive(benchmark::State& st) {
  std::string text = slurp("decay_lemmas.kyx");
  for (auto _ : st) benchmark::DoNotOptimize(parse_archive(text));
  st.SetBytesProcessed(static_cast<int64_t>(st.iterations() * text.size()));
}
BENCHMARK(BM_ParseArchive);

static void BM_ParsePrintFormula(benchmark::State& st) {
  int n = static_cast<int>(st.range(0));
  std::string prog;
  for (int i = 0; i < n; ++i) prog += "?x" + std::to_string(i) + ">=0; x" + std::to_string(i) + ":=x" + std::to_string(i) + "+1;";
  std::string text = "[{" + prog + "}*]" + chain(n, "+") + ">=0";
  for (auto _ : st) benchmark::DoNotOptimize(print(parse_formula(text)));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_ParsePrintFormula)->RangeMultiplier(4)->Range(4, 256)->Complexity();

static void BM_CheckArchive(benchmark::State& st) {
  Archive a = parse_archive(slurp("decay_lemmas.kyx"));
  for (auto _ : st) {
    auto store = std::make_shared<LemmaStore>();
    for (const auto& e : a.entries) {
      Prover pv = Prover::for_entry(e, store);
      pv.run(0, *e.tactics.front().tactic);
      FinalizeResult fr = pv.finalize();
      if (e.kind == EntryKind::Lemma) store->store(store->prove(e));
      benchmark::DoNotOptimize(fr);
    }
  }
}
BENCHMARK(BM_CheckArchive)->Unit(benchmark::kMillisecond);

static void BM_DecideLinear(benchmark::State& st) {
  int n = static_cast<int>(st.range(0));
  // x0>=0, x1>=x0, ..., ==> x_{n-1}>=0
  std::string seq = "x0>=0";
  for (int i = 1; i < n; ++i) seq += ", x" + std::to_string(i) + ">=x" + std::to_string(i - 1);
  seq += " ==> x" + std::to_string(n - 1) + ">=0";
  Sequent s = parse_sequent(seq);
  for (auto _ : st) benchmark::DoNotOptimize(decide_linear(s));
  st.SetComplexityN(n);
}
BENCHMARK(BM_DecideLinear)->DenseRange(2, 10, 2)->Complexity();

static void BM_QECascadeQuotient(benchmark::State& st) {
  Sequent s = parse_sequent("x>=0, y!=0 ==> x/y^2>=0");
  for (auto _ : st) benchmark::DoNotOptimize(qe(s));
}
BENCHMARK(BM_QECascadeQuotient);

static void BM_USubstFormula(benchmark::State& st) {
  int n = static_cast<int>(st.range(0));
  std::string f = "p(x0)";
  for (int i = 1; i < n; ++i) f = "[x" + std::to_string(i) + ":=x" + std::to_string(i) + "+1;](" + f + " & p(x" + std::to_string(i) + "))";
  Expr e = parse_formula(f, {{"p", mk::predicate_symbol("p", 1)}});
  USubst s;
  s.add(mk::predicate_symbol("p", 1), mk::ge(mk::times(mk::dot(0), mk::dot(0)), mk::num(0)));
  for (auto _ : st) benchmark::DoNotOptimize(usubst_expr(s, e));
  st.SetComplexityN(n);
}
BENCHMARK(BM_USubstFormula)->RangeMultiplier(2)->Range(4, 128)->Complexity();

static void BM_HalvingFinalize(benchmark::State& st) {
  Archive a = parse_archive(
      "Definitions Bool J(Real x); End. ProgramVariables Real x; End. Problem x=2 -> [{x:=1+(x-1)/2;}*]x>=-1 End.");
  Prover pv = Prover::for_entry(a.entries[0]);
  pv.run(0, "implyR(1); loop(\"J(x)\", 1)");
  pv.run(pv.tree().open_goals()[1], "assignb(1)");
  pv.define("J", ".>=1");
  for (NodeId n : pv.tree().open_goals()) pv.run(n, "QE");
  for (auto _ : st) benchmark::DoNotOptimize(pv.finalize());
}
BENCHMARK(BM_HalvingFinalize);
BENCHMARK_MAIN();
