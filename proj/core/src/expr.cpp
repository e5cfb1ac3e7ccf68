#include "usp/expr.hpp"

#include <functional>

#include "usp/printer.hpp"

namespace usp {

class Node {
 public:
  Op op;
  Variable var;
  Rational num;
  unsigned dot = 0;
  Symbol symbol;
  CmpOp cmp = CmpOp::Eq;
  std::vector<Expr> children;
  std::vector<Variable> ode_vars;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_variable(const Variable& x) {
  std::size_t h = std::hash<std::string>{}(x.name);
  h = mix(h, x.index ? *x.index + 1 : 0);
  return mix(h, x.primed ? 1 : 0);
}

void finish_hash(Node& n) {
  std::size_t h = static_cast<std::size_t>(n.op) * 1315423911u;
  switch (n.op) {
    case Op::Var:
    case Op::Assign:
    case Op::Forall:
    case Op::Exists:
      h = mix(h, hash_variable(n.var));
      break;
    case Op::Num:
      h = mix(h, std::hash<std::string>{}(to_string(n.num)));
      break;
    case Op::Dot:
      h = mix(h, n.dot);
      break;
    case Op::Func:
    case Op::Pred:
    case Op::ProgConst:
      h = mix(h, std::hash<std::string>{}(n.symbol.name));
      h = mix(h, n.symbol.arity);
      h = mix(h, static_cast<std::size_t>(n.symbol.space));
      break;
    case Op::Cmp:
      h = mix(h, static_cast<std::size_t>(n.cmp));
      break;
    case Op::Ode:
      for (const auto& v : n.ode_vars) h = mix(h, hash_variable(v));
      break;
    default:
      break;
  }
  for (const auto& c : n.children) h = mix(h, c.hash());
  n.hash = h;
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Var: return "variable";
    case Op::Num: return "number";
    case Op::Dot: return "dot";
    case Op::Func: return "function application";
    case Op::Plus: return "+";
    case Op::Minus: return "-";
    case Op::Times: return "*";
    case Op::Divide: return "/";
    case Op::Power: return "^";
    case Op::Neg: return "negation";
    case Op::Differential: return "differential";
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Cmp: return "comparison";
    case Op::Pred: return "predicate application";
    case Op::Not: return "!";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Imply: return "->";
    case Op::Equiv: return "<->";
    case Op::Forall: return "\\forall";
    case Op::Exists: return "\\exists";
    case Op::Box: return "[]";
    case Op::Diamond: return "<>";
    case Op::Assign: return ":=";
    case Op::Test: return "?";
    case Op::Ode: return "ODE";
    case Op::Choice: return "++";
    case Op::Compose: return ";";
    case Op::Loop: return "*";
    case Op::ProgConst: return "program constant";
  }
  return "?";
}

}  // namespace

std::string Variable::str() const {
  std::string s = name;
  if (index) s += "_" + std::to_string(*index);
  if (primed) s += "'";
  return s;
}

std::string Symbol::str() const {
  std::string s = name;
  if (kind == SymbolKind::Program) return s;
  if (space == Space::Wild) return s + "(||)";
  return s + "/" + std::to_string(arity);
}

const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
  }
  return "?";
}

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Lt: return CmpOp::Ge;
  }
  return op;
}

CmpOp flip(CmpOp op) {
  switch (op) {
    case CmpOp::Ge: return CmpOp::Le;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Lt: return CmpOp::Gt;
    default: return op;
  }
}

Category category_of(Op op) {
  if (op <= Op::Differential) return Category::Term;
  if (op <= Op::Diamond) return Category::Formula;
  return Category::Program;
}

Op Expr::op() const { return node_->op; }
std::size_t Expr::arity() const { return node_->children.size(); }
const Expr& Expr::child(std::size_t i) const { return node_->children.at(i); }
std::span<const Expr> Expr::children() const { return node_->children; }
const Variable& Expr::var() const { return node_->var; }
const Rational& Expr::num() const { return node_->num; }
unsigned Expr::dot_index() const { return node_->dot; }
const Symbol& Expr::symbol() const { return node_->symbol; }
CmpOp Expr::cmp() const { return node_->cmp; }
std::span<const Variable> Expr::ode_vars() const { return node_->ode_vars; }
std::span<const Expr> Expr::ode_rhs() const {
  return std::span<const Expr>(node_->children).first(node_->ode_vars.size());
}
const Expr& Expr::ode_domain() const { return node_->children.back(); }
std::size_t Expr::hash() const { return node_ ? node_->hash : 0; }
std::string Expr::str() const { return print(*this); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.hash != y.hash || x.op != y.op || x.children.size() != y.children.size()) return false;
  switch (x.op) {
    case Op::Var:
    case Op::Assign:
    case Op::Forall:
    case Op::Exists:
      if (x.var != y.var) return false;
      break;
    case Op::Num:
      if (x.num != y.num) return false;
      break;
    case Op::Dot:
      if (x.dot != y.dot) return false;
      break;
    case Op::Func:
    case Op::Pred:
    case Op::ProgConst:
      if (x.symbol != y.symbol) return false;
      break;
    case Op::Cmp:
      if (x.cmp != y.cmp) return false;
      break;
    case Op::Ode:
      if (x.ode_vars != y.ode_vars) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (!(x.children[i] == y.children[i])) return false;
  return true;
}

bool operator<(const Expr& a, const Expr& b) {
  if (a == b) return false;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.op != y.op) return x.op < y.op;
  if (x.var != y.var) return x.var < y.var;
  if (x.num != y.num) return x.num < y.num;
  if (x.dot != y.dot) return x.dot < y.dot;
  if (x.symbol != y.symbol) return x.symbol < y.symbol;
  if (x.cmp != y.cmp) return x.cmp < y.cmp;
  if (x.ode_vars != y.ode_vars) return x.ode_vars < y.ode_vars;
  if (x.children.size() != y.children.size()) return x.children.size() < y.children.size();
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (x.children[i] != y.children[i]) return x.children[i] < y.children[i];
  return false;
}

bool syntactic_equal(const Expr& a, const Expr& b) { return a == b; }

class ExprFactory {
 public:
  static Expr make(Node n) {
    finish_hash(n);
    return Expr(std::make_shared<const Node>(std::move(n)));
  }
  static const Node& node(const Expr& e) { return *e.node_; }
};

namespace {

void require(const Expr& e, Category c, const char* what) {
  if (!e.valid()) throw ExprError(std::string("missing operand for ") + what);
  if (e.category() != c) {
    static const char* names[] = {"term", "formula", "program"};
    throw ExprError(std::string(what) + " expects a " + names[static_cast<int>(c)]);
  }
}

Expr unary(Op op, Expr a, Category c) {
  require(a, c, op_name(op));
  Node n;
  n.op = op;
  n.children = {std::move(a)};
  return ExprFactory::make(std::move(n));
}

Expr binary(Op op, Expr a, Expr b, Category c) {
  require(a, c, op_name(op));
  require(b, c, op_name(op));
  Node n;
  n.op = op;
  n.children = {std::move(a), std::move(b)};
  return ExprFactory::make(std::move(n));
}

Expr leaf(Op op) {
  Node n;
  n.op = op;
  return ExprFactory::make(std::move(n));
}

Expr applied(Op op, const Symbol& s, std::vector<Expr> args) {
  if (s.space == Space::Wild && !args.empty())
    throw ExprError("wild symbol " + s.name + " takes no arguments");
  if (s.space == Space::Applied && args.size() != s.arity)
    throw ExprError("symbol " + s.name + " expects " + std::to_string(s.arity) + " arguments, got " +
                    std::to_string(args.size()));
  for (const auto& a : args) require(a, Category::Term, s.name.c_str());
  Node n;
  n.op = op;
  n.symbol = s;
  n.children = std::move(args);
  return ExprFactory::make(std::move(n));
}

}  // namespace

namespace mk {

Expr var(const Variable& x) {
  if (x.name.empty()) throw ExprError("empty variable name");
  Node n;
  n.op = Op::Var;
  n.var = x;
  return ExprFactory::make(std::move(n));
}
Expr var(const std::string& name) { return var(Variable(name)); }

Expr num(const Rational& value) {
  Node n;
  n.op = Op::Num;
  n.num = value;
  return ExprFactory::make(std::move(n));
}
Expr num(long value) { return num(Rational(value)); }

Expr dot(unsigned index) {
  Node n;
  n.op = Op::Dot;
  n.dot = index;
  return ExprFactory::make(std::move(n));
}

Expr func(const Symbol& f, std::vector<Expr> args) {
  if (f.kind != SymbolKind::Function) throw ExprError(f.name + " is not a function symbol");
  return applied(Op::Func, f, std::move(args));
}
Expr plus(Expr a, Expr b) { return binary(Op::Plus, std::move(a), std::move(b), Category::Term); }
Expr minus(Expr a, Expr b) { return binary(Op::Minus, std::move(a), std::move(b), Category::Term); }
Expr times(Expr a, Expr b) { return binary(Op::Times, std::move(a), std::move(b), Category::Term); }
Expr divide(Expr a, Expr b) { return binary(Op::Divide, std::move(a), std::move(b), Category::Term); }
Expr power(Expr a, Expr b) {
  if (!b.valid() || b.op() != Op::Num || !is_integer(b.num()) || b.num() < 0)
    throw ExprError("exponent must be a natural number literal");
  return binary(Op::Power, std::move(a), std::move(b), Category::Term);
}
Expr neg(Expr a) { return unary(Op::Neg, std::move(a), Category::Term); }
Expr differential(Expr a) { return unary(Op::Differential, std::move(a), Category::Term); }

Expr tru() { return leaf(Op::True); }
Expr fls() { return leaf(Op::False); }
Expr cmp(CmpOp op, Expr a, Expr b) {
  require(a, Category::Term, "comparison");
  require(b, Category::Term, "comparison");
  Node n;
  n.op = Op::Cmp;
  n.cmp = op;
  n.children = {std::move(a), std::move(b)};
  return ExprFactory::make(std::move(n));
}
Expr eq(Expr a, Expr b) { return cmp(CmpOp::Eq, std::move(a), std::move(b)); }
Expr ge(Expr a, Expr b) { return cmp(CmpOp::Ge, std::move(a), std::move(b)); }
Expr gt(Expr a, Expr b) { return cmp(CmpOp::Gt, std::move(a), std::move(b)); }
Expr pred(const Symbol& p, std::vector<Expr> args) {
  if (p.kind != SymbolKind::Predicate) throw ExprError(p.name + " is not a predicate symbol");
  return applied(Op::Pred, p, std::move(args));
}
Expr lnot(Expr a) { return unary(Op::Not, std::move(a), Category::Formula); }
Expr land(Expr a, Expr b) { return binary(Op::And, std::move(a), std::move(b), Category::Formula); }
Expr lor(Expr a, Expr b) { return binary(Op::Or, std::move(a), std::move(b), Category::Formula); }
Expr imply(Expr a, Expr b) { return binary(Op::Imply, std::move(a), std::move(b), Category::Formula); }
Expr equiv(Expr a, Expr b) { return binary(Op::Equiv, std::move(a), std::move(b), Category::Formula); }

static Expr quantifier(Op op, const Variable& x, Expr body) {
  require(body, Category::Formula, op_name(op));
  Node n;
  n.op = op;
  n.var = x;
  n.children = {std::move(body)};
  return ExprFactory::make(std::move(n));
}
Expr forall(const Variable& x, Expr body) { return quantifier(Op::Forall, x, std::move(body)); }
Expr exists(const Variable& x, Expr body) { return quantifier(Op::Exists, x, std::move(body)); }

static Expr modality(Op op, Expr program, Expr post) {
  require(program, Category::Program, op_name(op));
  require(post, Category::Formula, op_name(op));
  Node n;
  n.op = op;
  n.children = {std::move(program), std::move(post)};
  return ExprFactory::make(std::move(n));
}
Expr box(Expr program, Expr post) { return modality(Op::Box, std::move(program), std::move(post)); }
Expr diamond(Expr program, Expr post) { return modality(Op::Diamond, std::move(program), std::move(post)); }

Expr assign(const Variable& x, Expr value) {
  require(value, Category::Term, ":=");
  if (x.primed) throw ExprError("cannot assign to a differential symbol");
  Node n;
  n.op = Op::Assign;
  n.var = x;
  n.children = {std::move(value)};
  return ExprFactory::make(std::move(n));
}
Expr test(Expr condition) { return unary(Op::Test, std::move(condition), Category::Formula); }

Expr ode(std::vector<Variable> vars, std::vector<Expr> rhs, Expr domain) {
  if (vars.empty() || vars.size() != rhs.size()) throw ExprError("malformed differential equation");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].primed) throw ExprError("ODE variables are stored unprimed");
    for (std::size_t j = 0; j < i; ++j)
      if (vars[i] == vars[j]) throw ExprError("duplicate ODE left-hand side " + vars[i].str() + "'");
    require(rhs[i], Category::Term, "ODE");
  }
  require(domain, Category::Formula, "ODE domain");
  Node n;
  n.op = Op::Ode;
  n.ode_vars = std::move(vars);
  n.children = std::move(rhs);
  n.children.push_back(std::move(domain));
  return ExprFactory::make(std::move(n));
}
Expr choice(Expr a, Expr b) { return binary(Op::Choice, std::move(a), std::move(b), Category::Program); }
Expr compose(Expr a, Expr b) { return binary(Op::Compose, std::move(a), std::move(b), Category::Program); }
Expr loop(Expr body) { return unary(Op::Loop, std::move(body), Category::Program); }
Expr prog(const Symbol& a) {
  if (a.kind != SymbolKind::Program) throw ExprError(a.name + " is not a program symbol");
  Node n;
  n.op = Op::ProgConst;
  n.symbol = a;
  return ExprFactory::make(std::move(n));
}

Expr with_children(const Expr& e, std::vector<Expr> children) {
  const Node& old = ExprFactory::node(e);
  bool same = children.size() == old.children.size();
  for (std::size_t i = 0; same && i < children.size(); ++i) same = children[i] == old.children[i];
  if (same) return e;
  switch (old.op) {
    case Op::Func: return func(old.symbol, std::move(children));
    case Op::Pred: return pred(old.symbol, std::move(children));
    case Op::Plus: return plus(children[0], children[1]);
    case Op::Minus: return minus(children[0], children[1]);
    case Op::Times: return times(children[0], children[1]);
    case Op::Divide: return divide(children[0], children[1]);
    case Op::Power: return power(children[0], children[1]);
    case Op::Neg: return neg(children[0]);
    case Op::Differential: return differential(children[0]);
    case Op::Cmp: return cmp(old.cmp, children[0], children[1]);
    case Op::Not: return lnot(children[0]);
    case Op::And: return land(children[0], children[1]);
    case Op::Or: return lor(children[0], children[1]);
    case Op::Imply: return imply(children[0], children[1]);
    case Op::Equiv: return equiv(children[0], children[1]);
    case Op::Forall: return forall(old.var, children[0]);
    case Op::Exists: return exists(old.var, children[0]);
    case Op::Box: return box(children[0], children[1]);
    case Op::Diamond: return diamond(children[0], children[1]);
    case Op::Assign: return assign(old.var, children[0]);
    case Op::Test: return test(children[0]);
    case Op::Ode: {
      Expr domain = children.back();
      children.pop_back();
      return ode(old.ode_vars, std::move(children), std::move(domain));
    }
    case Op::Choice: return choice(children[0], children[1]);
    case Op::Compose: return compose(children[0], children[1]);
    case Op::Loop: return loop(children[0]);
    default: throw ExprError("leaf expressions have no children");
  }
}

Expr with_var(const Expr& e, const Variable& x) {
  const Node& old = ExprFactory::node(e);
  switch (old.op) {
    case Op::Var: return var(x);
    case Op::Assign: return assign(x, old.children[0]);
    case Op::Forall: return forall(x, old.children[0]);
    case Op::Exists: return exists(x, old.children[0]);
    default: throw ExprError("expression carries no variable");
  }
}

Expr with_ode_vars(const Expr& e, std::vector<Variable> vars) {
  const Node& old = ExprFactory::node(e);
  if (old.op != Op::Ode) throw ExprError("not an ODE");
  std::vector<Expr> rhs(old.children.begin(), old.children.end() - 1);
  return ode(std::move(vars), std::move(rhs), old.children.back());
}

Symbol function_symbol(const std::string& name, unsigned arity) {
  return Symbol{name, SymbolKind::Function, arity, Space::Applied};
}
Symbol predicate_symbol(const std::string& name, unsigned arity) {
  return Symbol{name, SymbolKind::Predicate, arity, Space::Applied};
}
Symbol program_symbol(const std::string& name) { return Symbol{name, SymbolKind::Program, 0, Space::Applied}; }
Symbol wild_predicate(const std::string& name) { return Symbol{name, SymbolKind::Predicate, 0, Space::Wild}; }
Symbol wild_function(const std::string& name) { return Symbol{name, SymbolKind::Function, 0, Space::Wild}; }

}  // namespace mk

}  // namespace usp
