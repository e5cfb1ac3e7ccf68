#include "lp.hpp"

#include <optional>

namespace usp::testing {

Expr to_expr(const LinAtom& a, const std::vector<Variable>& vars) {
  std::optional<Expr> lhs;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (a.coef[i] == 0) continue;
    Expr m = a.coef[i] == 1 ? mk::var(vars[i]) : mk::times(mk::num(a.coef[i]), mk::var(vars[i]));
    lhs = lhs ? mk::plus(*lhs, m) : m;
  }
  return mk::cmp(a.op, lhs ? *lhs : mk::num(0), mk::num(a.rhs));
}

namespace {

// a.x <= b, or a.x < b when strict
struct Row {
  std::vector<Rational> a;
  Rational b;
  bool strict = false;
};

std::optional<std::vector<Rational>> solve(std::vector<std::vector<Rational>> m, std::vector<Rational> r) {
  std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(m[p], m[c]);
    std::swap(r[p], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m[i][c] == 0) continue;
      Rational f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
      r[i] -= f * r[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) r[i] /= m[i][i];
  return r;
}

// Maximise t over {a.x + [strict] t <= b} within a box, 0 <= t <= 1, by trying every basis.
// Feasible (with strict rows strictly satisfied) iff the optimum exists and t* > 0, or no
// strict rows and the region is nonempty.
bool feasible_rows(const std::vector<Row>& rows, std::size_t n) {
  const Rational box = 10000;
  std::size_t d = n + 1;  // x_0..x_{n-1}, t
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> B;
  for (const auto& r : rows) {
    auto a = r.a;
    a.push_back(r.strict ? 1 : 0);
    A.push_back(a);
    B.push_back(r.b);
  }
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<Rational> up(d, 0), lo(d, 0);
    up[i] = 1;
    lo[i] = -1;
    A.push_back(up);
    B.push_back(i == n ? Rational(1) : box);
    A.push_back(lo);
    B.push_back(i == n ? Rational(0) : box);
  }
  bool any_strict = false;
  for (const auto& r : rows) any_strict = any_strict || r.strict;
  std::optional<Rational> best;
  std::vector<std::size_t> pick(d);
  std::size_t m = A.size();
  for (std::size_t i = 0; i < d; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<Rational>> M;
    std::vector<Rational> R;
    for (auto k : pick) {
      M.push_back(A[k]);
      R.push_back(B[k]);
    }
    if (auto x = solve(M, R)) {
      bool ok = true;
      for (std::size_t k = 0; k < m && ok; ++k) {
        Rational s = 0;
        for (std::size_t j = 0; j < d; ++j) s += A[k][j] * (*x)[j];
        ok = s <= B[k];
      }
      if (ok && (!best || (*x)[n] > *best)) best = (*x)[n];
    }
    // next combination
    std::size_t i = d;
    while (i > 0 && pick[i - 1] == m - d + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < d; ++j) pick[j] = pick[j - 1] + 1;
  }
  if (!best) return false;
  return !any_strict || *best > 0;
}

void to_rows(const LinAtom& at, std::vector<Row>& rows) {
  auto neg = at.coef;
  for (auto& c : neg) c = -c;
  switch (at.op) {
    case CmpOp::Le: rows.push_back({at.coef, at.rhs, false}); break;
    case CmpOp::Lt: rows.push_back({at.coef, at.rhs, true}); break;
    case CmpOp::Ge: rows.push_back({neg, -at.rhs, false}); break;
    case CmpOp::Gt: rows.push_back({neg, -at.rhs, true}); break;
    case CmpOp::Eq:
      rows.push_back({at.coef, at.rhs, false});
      rows.push_back({neg, -at.rhs, false});
      break;
    case CmpOp::Ne: break;  // split by the caller
  }
}

bool split(const std::vector<LinAtom>& atoms, std::size_t k, std::vector<Row>& rows, std::size_t n) {
  if (k == atoms.size()) return feasible_rows(rows, n);
  const LinAtom& a = atoms[k];
  if (a.op != CmpOp::Ne) {
    std::size_t mark = rows.size();
    to_rows(a, rows);
    bool r = split(atoms, k + 1, rows, n);
    rows.resize(mark);
    return r;
  }
  for (CmpOp op : {CmpOp::Lt, CmpOp::Gt}) {
    std::size_t mark = rows.size();
    to_rows({a.coef, op, a.rhs}, rows);
    bool r = split(atoms, k + 1, rows, n);
    rows.resize(mark);
    if (r) return true;
  }
  return false;
}

}  // namespace

bool feasible(const std::vector<LinAtom>& atoms, std::size_t n) {
  std::vector<Row> rows;
  return split(atoms, 0, rows, n);
}

bool valid(const std::vector<LinAtom>& ante, const std::vector<LinAtom>& succ, std::size_t n) {
  std::vector<LinAtom> all = ante;
  for (const auto& s : succ) all.push_back({s.coef, negate(s.op), s.rhs});
  return !feasible(all, n);
}

}  // namespace usp::testing
