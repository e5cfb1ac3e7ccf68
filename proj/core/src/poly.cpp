#include "usp/poly.hpp"

#include <algorithm>

namespace usp {

Poly Poly::constant(const Rational& c) {
  Poly p;
  p.add_term({}, c);
  return p;
}

Poly Poly::atom(unsigned index) {
  Poly p;
  p.add_term({{index, 1}}, 1);
  return p;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Rational Poly::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

unsigned Poly::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) {
    unsigned k = 0;
    for (const auto& [v, e] : m) k += e;
    d = std::max(d, k);
  }
  return d;
}

std::vector<unsigned> Poly::atoms() const {
  std::vector<unsigned> r;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m) r.push_back(v);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

bool Poly::linear_in(unsigned v, Rational& a, Poly& rest) const {
  a = 0;
  rest = Poly();
  for (const auto& [m, c] : terms_) {
    auto it = m.find(v);
    if (it == m.end()) {
      rest.add_term(m, c);
    } else if (it->second == 1 && m.size() == 1) {
      a = c;
    } else {
      return false;
    }
  }
  return a != 0;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (const auto& [m1, c1] : terms_) {
    for (const auto& [m2, c2] : o.terms_) {
      Monomial m = m1;
      for (const auto& [v, e] : m2) m[v] += e;
      r.add_term(m, c1 * c2);
    }
  }
  return r;
}

Poly Poly::operator-() const { return scaled(-1); }

Poly Poly::scaled(const Rational& c) const {
  Poly r;
  if (c == 0) return r;
  for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

Poly Poly::pow(unsigned n) const {
  Poly r = constant(1);
  Poly b = *this;
  while (n) {
    if (n & 1U) r = r * b;
    n >>= 1U;
    if (n) b = b * b;
  }
  return r;
}

Poly Poly::substitute(unsigned v, const Poly& q) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    auto it = m.find(v);
    if (it == m.end()) {
      r.add_term(m, c);
      continue;
    }
    Monomial rest = m;
    unsigned e = it->second;
    rest.erase(v);
    Poly t;
    t.add_term(rest, c);
    r = r + t * q.pow(e);
  }
  return r;
}

Rational Poly::evaluate(const std::map<unsigned, Rational>& values) const {
  Rational sum = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [v, e] : m) {
      auto it = values.find(v);
      t *= usp::pow(it == values.end() ? Rational(0) : it->second, e);
    }
    sum += t;
  }
  return sum;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += to_string(c);
    for (const auto& [v, e] : m) s += "*a" + std::to_string(v) + (e > 1 ? "^" + std::to_string(e) : "");
  }
  return s;
}

unsigned AtomTable::intern(const Expr& term) {
  auto it = index_.find(term);
  if (it != index_.end()) return it->second;
  auto i = static_cast<unsigned>(terms_.size());
  terms_.push_back(term);
  index_.emplace(term, i);
  return i;
}

unsigned AtomTable::fresh() {
  auto i = static_cast<unsigned>(terms_.size());
  terms_.push_back(mk::num(0L));
  return i;
}

}  // namespace usp
