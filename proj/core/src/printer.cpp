#include "usp/printer.hpp"

#include <sstream>

namespace usp {

namespace {

int term_prec(const Expr& e) {
  switch (e.op()) {
    case Op::Plus:
    case Op::Minus: return 10;
    case Op::Times:
    case Op::Divide: return 20;
    case Op::Neg: return 30;
    case Op::Num: return e.num() < 0 ? 30 : 50;
    case Op::Power: return 40;
    default: return 50;
  }
}

int formula_prec(const Expr& e) {
  switch (e.op()) {
    case Op::Equiv: return 1;
    case Op::Imply: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Not:
    case Op::Forall:
    case Op::Exists:
    case Op::Box:
    case Op::Diamond: return 5;
    default: return 6;
  }
}

int program_prec(const Expr& e) {
  switch (e.op()) {
    case Op::Choice: return 1;
    case Op::Compose: return 2;
    default: return 3;
  }
}

class Printer {
 public:
  std::string expr(const Expr& e) {
    switch (e.category()) {
      case Category::Term: return term(e, 0);
      case Category::Formula: return formula(e, 0);
      case Category::Program: return program(e, 0);
    }
    return {};
  }

  std::string term(const Expr& e, int min_prec) {
    std::string s = term_raw(e);
    return term_prec(e) < min_prec ? "(" + s + ")" : s;
  }

  std::string formula(const Expr& e, int min_prec) {
    std::string s = formula_raw(e);
    return formula_prec(e) < min_prec ? "(" + s + ")" : s;
  }

  std::string program(const Expr& e, int min_prec) {
    std::string s = program_raw(e);
    return program_prec(e) < min_prec ? "{" + s + "}" : s;
  }

 private:
  std::string args(const Expr& e) {
    if (e.symbol().space == Space::Wild) return "(||)";
    std::string s = "(";
    for (std::size_t i = 0; i < e.arity(); ++i) {
      if (i) s += ",";
      s += term(e.child(i), 0);
    }
    return s + ")";
  }

  std::string number(const Rational& r) {
    if (has_finite_decimal(r)) return to_string(r);
    // Non-decimal rationals never come out of the parser; print as a quotient.
    return "(" + numerator_of(r).str() + "/" + denominator_of(r).str() + ")";
  }

  std::string term_raw(const Expr& e) {
    switch (e.op()) {
      case Op::Var: return e.var().str();
      case Op::Num: return number(e.num());
      case Op::Dot: return e.dot_index() == 0 ? "." : "._" + std::to_string(e.dot_index());
      case Op::Func: return e.symbol().name + args(e);
      case Op::Plus: return term(e.child(0), 10) + "+" + term(e.child(1), 11);
      case Op::Minus: return term(e.child(0), 10) + "-" + term(e.child(1), 11);
      case Op::Times: return term(e.child(0), 20) + "*" + term(e.child(1), 21);
      case Op::Divide: return term(e.child(0), 20) + "/" + term(e.child(1), 21);
      case Op::Power: return term(e.child(0), 41) + "^" + term(e.child(1), 40);
      case Op::Neg: {
        const Expr& a = e.child(0);
        if (a.op() == Op::Num && a.num() >= 0) return "-(" + number(a.num()) + ")";
        return "-" + term(a, 30);
      }
      case Op::Differential: return "(" + term(e.child(0), 0) + ")'";
      default: return "<?>";
    }
  }

  std::string formula_raw(const Expr& e) {
    switch (e.op()) {
      case Op::True: return "true";
      case Op::False: return "false";
      case Op::Cmp: return term(e.child(0), 0) + cmp_text(e.cmp()) + term(e.child(1), 0);
      case Op::Pred: return e.symbol().name + args(e);
      case Op::Not: return "!" + formula(e.child(0), 5);
      case Op::And: return formula(e.child(0), 5) + "&" + formula(e.child(1), 4);
      case Op::Or: return formula(e.child(0), 4) + "|" + formula(e.child(1), 3);
      case Op::Imply: return formula(e.child(0), 3) + "->" + formula(e.child(1), 2);
      case Op::Equiv: return formula(e.child(0), 2) + "<->" + formula(e.child(1), 1);
      case Op::Forall: return "\\forall " + e.var().str() + " " + formula(e.child(0), 5);
      case Op::Exists: return "\\exists " + e.var().str() + " " + formula(e.child(0), 5);
      case Op::Box: return "[" + program(e.child(0), 0) + "]" + formula(e.child(1), 5);
      case Op::Diamond: return "<" + program(e.child(0), 0) + ">" + formula(e.child(1), 5);
      default: return "<?>";
    }
  }

  std::string program_raw(const Expr& e) {
    switch (e.op()) {
      case Op::Assign: return e.var().str() + ":=" + term(e.child(0), 0) + ";";
      case Op::Test: return "?" + formula(e.child(0), 0) + ";";
      case Op::ProgConst: return e.symbol().name + ";";
      case Op::Ode: {
        std::string s = "{";
        auto vars = e.ode_vars();
        auto rhs = e.ode_rhs();
        for (std::size_t i = 0; i < vars.size(); ++i) {
          if (i) s += ",";
          s += vars[i].str() + "'=" + term(rhs[i], 0);
        }
        if (e.ode_domain().op() != Op::True) s += "&" + formula(e.ode_domain(), 0);
        return s + "}";
      }
      case Op::Choice: return program(e.child(0), 2) + "++" + program(e.child(1), 1);
      case Op::Compose: return program(e.child(0), 3) + program(e.child(1), 2);
      case Op::Loop: return "{" + program(e.child(0), 0) + "}*";
      default: return "<?>";
    }
  }
};

}  // namespace

std::string print(const Expr& e) {
  if (!e.valid()) return "<null>";
  return Printer{}.expr(e);
}

std::string print(const Sequent& s) {
  std::ostringstream out;
  for (std::size_t i = 0; i < s.ante.size(); ++i) out << (i ? ", " : "") << print(s.ante[i]);
  out << (s.ante.empty() ? "==>" : " ==>");
  for (std::size_t i = 0; i < s.succ.size(); ++i) out << (i ? ", " : " ") << print(s.succ[i]);
  return out.str();
}

std::string Sequent::str() const { return print(*this); }

Expr Sequent::as_formula() const {
  Expr lhs;
  for (auto it = ante.rbegin(); it != ante.rend(); ++it) lhs = lhs.valid() ? mk::land(*it, lhs) : *it;
  Expr rhs;
  for (auto it = succ.rbegin(); it != succ.rend(); ++it) rhs = rhs.valid() ? mk::lor(*it, rhs) : *it;
  if (!rhs.valid()) rhs = mk::fls();
  if (!lhs.valid()) return rhs;
  return mk::imply(lhs, rhs);
}

}  // namespace usp
