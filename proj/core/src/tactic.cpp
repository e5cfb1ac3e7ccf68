#include "usp/tactic.hpp"

#include <algorithm>

#include "expr_parser.hpp"
#include "lexer.hpp"

namespace usp {

namespace {

std::shared_ptr<Tactic> node(TacticKind k) {
  auto t = std::make_shared<Tactic>();
  t->kind = k;
  return t;
}

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// "f1 :: f2 :: nil" -> {f1, f2}
std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t k = s.find("::", start);
    std::string part = trim(s.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start));
    if (!part.empty() && part != "nil") out.push_back(part);
    if (k == std::string_view::npos) break;
    start = k + 2;
  }
  return out;
}

class TacticParser {
 public:
  explicit TacticParser(std::vector<detail::Token> tokens) : in_(std::move(tokens)) {}

  TacticPtr run() {
    TacticPtr t = sequence();
    if (!in_.at_eof()) in_.fail("unexpected '" + detail::TokenCursor::describe(in_.peek()) + "' in tactic");
    return t;
  }

 private:
  TacticPtr sequence() {
    TacticPtr t = postfix();
    while (in_.accept(";")) {
      if (closes_here()) break;  // trailing ';'
      t = Tactic::seq(t, postfix());
    }
    return t;
  }

  bool closes_here() const { return in_.at_eof() || in_.at_punct(")") || in_.at_punct(","); }

  TacticPtr postfix() {
    TacticPtr t = primary();
    while (true) {
      if (in_.accept("*")) {
        t = Tactic::repeat(t);
      } else if (in_.at_ident("using")) {
        in_.next();
        t = Tactic::using_(t, split_list(in_.expect_string()));
      } else {
        return t;
      }
    }
  }

  TacticPtr primary() {
    if (in_.at_punct("<") && in_.at_punct("(", 1)) {
      in_.next();
      in_.next();
      std::vector<TacticPtr> kids;
      std::vector<std::optional<std::string>> labels;
      if (!in_.at_punct(")")) {
        do {
          std::optional<std::string> label;
          if (in_.peek().kind == detail::Tok::String && in_.at_punct(":", 1)) {
            detail::Token tok = in_.next();
            label = tok.text;
            if (std::find(labels.begin(), labels.end(), label) != labels.end())
              throw ParseError("duplicate branch label \"" + *label + "\"", tok.line, tok.column);
            in_.next();
          }
          labels.push_back(label);
          kids.push_back(sequence());
        } while (in_.accept(","));
      }
      in_.expect(")");
      return Tactic::branch(std::move(kids), std::move(labels));
    }
    if (in_.accept("(")) {
      TacticPtr t = sequence();
      in_.expect(")");
      return t;
    }
    const detail::Token& tok = in_.peek();
    if (tok.kind != detail::Tok::Ident) in_.fail("expected a tactic but found '" + detail::TokenCursor::describe(tok) + "'");
    std::string name = in_.next().text;
    if (name == "nil" || name == "skip") return Tactic::skip();
    if (name == "expandAllDefs") return Tactic::expand_all();
    if (name == "expand") return Tactic::expand(in_.expect_string());
    if (name == "US") {
      in_.expect("(");
      in_.expect("{");
      if (in_.peek().kind != detail::Tok::BackString) in_.fail("expected `...` substitution list");
      std::vector<std::pair<std::string, std::string>> pairs;
      for (const auto& item : split_list(in_.next().text)) {
        std::size_t k = item.find("~>");
        if (k == std::string::npos) in_.fail("substitution pair without '~>': " + item);
        pairs.emplace_back(trim(std::string_view(item).substr(0, k)), trim(std::string_view(item).substr(k + 2)));
      }
      in_.expect("}");
      in_.expect(")");
      return Tactic::us(std::move(pairs));
    }
    if (name == "useLemma") {
      in_.expect("(");
      std::string lemma = in_.expect_string();
      TacticPtr adapt;
      if (in_.accept(",")) {
        const detail::Token& at = in_.peek();
        std::string text = in_.expect_string();
        try {
          adapt = parse_tactic(text);
        } catch (const ParseError& e) {
          throw ParseError(std::string("in useLemma adaptation: ") + e.what(), at.line, at.column);
        }
      }
      in_.expect(")");
      return Tactic::use_lemma(std::move(lemma), std::move(adapt));
    }
    std::vector<std::string> inputs;
    std::optional<Locator> loc;
    if (in_.accept("(")) {
      if (!in_.at_punct(")")) {
        do {
          if (in_.accept("'")) {
            if (loc) in_.fail("atom " + name + " has two locators");
            std::string side = in_.expect_ident();
            if (side != "R" && side != "L") in_.fail("locator side must be 'R or 'L");
            Locator l;
            l.succ = side == "R";
            if (in_.accept("==")) l.shape = in_.expect_string();
            loc = l;
          } else if (in_.peek().kind == detail::Tok::Number || in_.at_punct("-")) {
            if (loc) in_.fail("atom " + name + " has two locators");
            bool neg = in_.accept("-");
            if (in_.peek().kind != detail::Tok::Number) in_.fail("expected a position after '-'");
            std::string digits = in_.next().text;
            if (digits.find_first_not_of("0123456789") != std::string::npos || std::stoul(digits) == 0)
              in_.fail("position must be a nonzero integer");
            Locator l;
            l.succ = !neg;
            l.index = std::stoul(digits) - 1;
            loc = l;
          } else if (in_.peek().kind == detail::Tok::String) {
            inputs.push_back(in_.next().text);
          } else {
            in_.fail("expected a tactic argument but found '" + detail::TokenCursor::describe(in_.peek()) + "'");
          }
        } while (in_.accept(","));
      }
      in_.expect(")");
    }
    return Tactic::atom(std::move(name), std::move(inputs), std::move(loc));
  }

  detail::TokenCursor in_;
};

std::string quote(const std::string& s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += c;
  }
  return r + "\"";
}

bool is_simple(const Tactic& t) {
  switch (t.kind) {
    case TacticKind::Seq:
    case TacticKind::Using:
    case TacticKind::Repeat: return false;
    default: return true;
  }
}

void print_into(const Tactic& t, std::string& out);

void print_wrapped(const Tactic& t, std::string& out) {
  if (is_simple(t)) {
    print_into(t, out);
    return;
  }
  out += "(";
  print_into(t, out);
  out += ")";
}

void print_into(const Tactic& t, std::string& out) {
  switch (t.kind) {
    case TacticKind::Atom: {
      out += t.name;
      if (t.inputs.empty() && !t.locator) return;
      out += "(";
      bool first = true;
      for (const auto& in : t.inputs) {
        if (!first) out += ", ";
        first = false;
        out += quote(in);
      }
      if (t.locator) {
        if (!first) out += ", ";
        if (t.locator->index)
          out += (t.locator->succ ? "" : "-") + std::to_string(*t.locator->index + 1);
        else
          out += t.locator->succ ? "'R" : "'L";
        if (t.locator->shape) out += "==" + quote(*t.locator->shape);
      }
      out += ")";
      return;
    }
    case TacticKind::Seq:
      print_into(*t.children[0], out);
      out += "; ";
      if (t.children[1]->kind == TacticKind::Seq) {
        out += "(";
        print_into(*t.children[1], out);
        out += ")";
      } else {
        print_into(*t.children[1], out);
      }
      return;
    case TacticKind::Branch: {
      out += "<(";
      for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) out += ", ";
        if (t.labels[i]) out += quote(*t.labels[i]) + ": ";
        print_into(*t.children[i], out);
      }
      out += ")";
      return;
    }
    case TacticKind::Repeat:
      print_wrapped(*t.children[0], out);
      out += "*";
      return;
    case TacticKind::Using: {
      print_wrapped(*t.children[0], out);
      std::string list;
      for (const auto& f : t.formulas) list += f + " :: ";
      out += " using " + quote(list + "nil");
      return;
    }
    case TacticKind::Skip: out += "skip"; return;
    case TacticKind::ExpandDef: out += "expand " + quote(t.name); return;
    case TacticKind::ExpandAll: out += "expandAllDefs"; return;
    case TacticKind::UsTactic: {
      out += "US({`";
      for (const auto& [a, b] : t.pairs) out += a + "~>" + b + " :: ";
      out += "nil`})";
      return;
    }
    case TacticKind::UseLemma:
      out += "useLemma(" + quote(t.name);
      if (t.adaptation) out += ", " + quote(print(*t.adaptation));
      out += ")";
      return;
  }
}

}  // namespace

TacticPtr Tactic::atom(std::string name, std::vector<std::string> inputs, std::optional<Locator> loc) {
  auto t = node(TacticKind::Atom);
  t->name = std::move(name);
  t->inputs = std::move(inputs);
  t->locator = std::move(loc);
  return t;
}

TacticPtr Tactic::seq(TacticPtr a, TacticPtr b) {
  auto t = node(TacticKind::Seq);
  t->children = {std::move(a), std::move(b)};
  return t;
}

TacticPtr Tactic::branch(std::vector<TacticPtr> children, std::vector<std::optional<std::string>> labels) {
  auto t = node(TacticKind::Branch);
  labels.resize(children.size());
  t->children = std::move(children);
  t->labels = std::move(labels);
  return t;
}

TacticPtr Tactic::repeat(TacticPtr inner) {
  auto t = node(TacticKind::Repeat);
  t->children = {std::move(inner)};
  return t;
}

TacticPtr Tactic::using_(TacticPtr inner, std::vector<std::string> keep) {
  auto t = node(TacticKind::Using);
  t->children = {std::move(inner)};
  t->formulas = std::move(keep);
  return t;
}

TacticPtr Tactic::skip() { return node(TacticKind::Skip); }

TacticPtr Tactic::expand(std::string name) {
  auto t = node(TacticKind::ExpandDef);
  t->name = std::move(name);
  return t;
}

TacticPtr Tactic::expand_all() { return node(TacticKind::ExpandAll); }

TacticPtr Tactic::us(std::vector<std::pair<std::string, std::string>> pairs) {
  auto t = node(TacticKind::UsTactic);
  t->pairs = std::move(pairs);
  return t;
}

TacticPtr Tactic::use_lemma(std::string name, TacticPtr adaptation) {
  auto t = node(TacticKind::UseLemma);
  t->name = std::move(name);
  t->adaptation = std::move(adaptation);
  return t;
}

bool equal(const Tactic& a, const Tactic& b) {
  if (a.kind != b.kind || a.name != b.name || a.inputs != b.inputs || a.locator != b.locator ||
      a.labels != b.labels || a.formulas != b.formulas || a.pairs != b.pairs ||
      a.children.size() != b.children.size() || !a.adaptation != !b.adaptation)
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!equal(*a.children[i], *b.children[i])) return false;
  return !a.adaptation || equal(*a.adaptation, *b.adaptation);
}

TacticPtr parse_tactic(std::string_view text) { return TacticParser(detail::tokenize(text)).run(); }

namespace detail {
TacticPtr parse_tactic_tokens(std::vector<Token> tokens) { return TacticParser(std::move(tokens)).run(); }
}  // namespace detail

std::string print(const Tactic& t) {
  std::string out;
  print_into(t, out);
  return out;
}

}  // namespace usp
