#include "usp/archive.hpp"

#include <set>

#include "expr_parser.hpp"
#include "lexer.hpp"
#include "usp/printer.hpp"
#include "usp/static_semantics.hpp"

namespace usp {

using detail::Tok;
using detail::Token;
using detail::TokenCursor;

Symbol Definition::symbol() const {
  switch (kind) {
    case DefKind::Bool: return mk::predicate_symbol(name, static_cast<unsigned>(params.size()));
    case DefKind::Real: return mk::function_symbol(name, static_cast<unsigned>(params.size()));
    case DefKind::HP: return mk::program_symbol(name);
  }
  return {};
}

std::optional<Expr> Definition::replacement() const {
  if (!body) return std::nullopt;
  Expr r = *body;
  for (std::size_t k = 0; k < params.size(); ++k) r = abstract_variable(r, params[k], static_cast<unsigned>(k));
  return r;
}

SymbolTable ArchiveEntry::symbols() const {
  SymbolTable t;
  for (const auto& d : definitions) t[d.name] = d.symbol();
  return t;
}

const Definition* ArchiveEntry::find_definition(const std::string& n) const {
  for (const auto& d : definitions)
    if (d.name == n) return &d;
  return nullptr;
}

const ArchiveEntry* Archive::find(const std::string& n) const {
  for (const auto& e : entries)
    if (e.name == n) return &e;
  return nullptr;
}

namespace {

class ArchiveParser {
 public:
  explicit ArchiveParser(std::string_view text) : in_(detail::tokenize(text)) {}

  Archive run() {
    Archive a;
    if (at_entry_keyword()) {
      while (!in_.at_eof()) {
        if (!at_entry_keyword()) in_.fail("expected Lemma or Theorem but found '" + TokenCursor::describe(in_.peek()) + "'");
        ArchiveEntry e;
        e.kind = in_.next().text == "Lemma" ? EntryKind::Lemma : EntryKind::Theorem;
        const Token& at = in_.peek();
        e.name = in_.expect_string();
        if (a.find(e.name)) throw ParseError("duplicate entry name \"" + e.name + "\"", at.line, at.column);
        body(e);
        expect_end();
        a.entries.push_back(std::move(e));
      }
    } else {
      ArchiveEntry e;
      body(e);
      if (!in_.at_eof()) in_.fail("unexpected '" + TokenCursor::describe(in_.peek()) + "' after Problem");
      a.entries.push_back(std::move(e));
    }
    return a;
  }

 private:
  bool at_entry_keyword() const {
    return in_.at_ident("Lemma") || in_.at_ident("Theorem") || in_.at_ident("ArchiveEntry");
  }

  void expect_end() {
    if (in_.peek().kind != Tok::KwEnd) in_.fail("expected 'End.' but found '" + TokenCursor::describe(in_.peek()) + "'");
    in_.next();
  }

  void expect_word(std::string_view w) {
    if (!in_.at_ident(w)) in_.fail("expected '" + std::string(w) + "' but found '" + TokenCursor::describe(in_.peek()) + "'");
    in_.next();
  }

  void body(ArchiveEntry& e) {
    if (in_.at_ident("Definitions")) {
      in_.next();
      while (in_.peek().kind != Tok::KwEnd) e.definitions.push_back(definition(e));
      in_.next();
    }
    bool declared_vars = false;
    if (in_.at_ident("ProgramVariables")) {
      declared_vars = true;
      in_.next();
      while (in_.peek().kind != Tok::KwEnd) {
        expect_word("Real");
        do {
          const Token& at = in_.peek();
          Variable x = detail::ExprParser::variable_from(in_.expect_ident());
          for (const auto& y : e.program_variables)
            if (y == x) throw ParseError("variable " + x.str() + " declared twice", at.line, at.column);
          e.program_variables.push_back(x);
        } while (in_.accept(","));
        in_.expect(";");
      }
      in_.next();
    }
    for (const auto& d : e.definitions)
      if (d.kind == DefKind::HP && d.body) check_symbols(e, *d.body, declared_vars, d.name, def_pos_.at(d.name));
    const Token& at = in_.peek();
    expect_word("Problem");
    SymbolTable table = e.symbols();
    detail::ExprParser p(in_, table);
    e.problem = p.formula();
    expect_end();
    check_symbols(e, e.problem, declared_vars, "Problem", at);
    while (in_.at_ident("Tactic")) {
      in_.next();
      TacticEntry t;
      t.name = in_.expect_string();
      std::vector<Token> toks;
      while (in_.peek().kind != Tok::KwEnd && !in_.at_eof()) toks.push_back(in_.next());
      Token eof = in_.peek();
      eof.kind = Tok::Eof;
      toks.push_back(eof);
      t.tactic = detail::parse_tactic_tokens(std::move(toks));
      expect_end();
      e.tactics.push_back(std::move(t));
    }
  }

  Definition definition(const ArchiveEntry& e) {
    const Token& at = in_.peek();
    std::string kw = in_.expect_ident();
    Definition d;
    if (kw == "Bool") {
      d.kind = DefKind::Bool;
    } else if (kw == "Real") {
      d.kind = DefKind::Real;
    } else if (kw == "HP") {
      d.kind = DefKind::HP;
    } else {
      throw ParseError("expected Bool, Real, or HP but found '" + kw + "'", at.line, at.column);
    }
    d.name = in_.expect_ident();
    if (e.find_definition(d.name)) throw ParseError("symbol " + d.name + " defined twice", at.line, at.column);
    def_pos_.emplace(d.name, at);
    if (d.kind != DefKind::HP && in_.accept("(")) {
      if (!in_.at_punct(")")) {
        do {
          expect_word("Real");
          d.params.push_back(detail::ExprParser::variable_from(in_.expect_ident()));
        } while (in_.accept(","));
      }
      in_.expect(")");
    }
    SymbolTable table = e.symbols();
    table[d.name] = d.symbol();
    detail::ExprParser p(in_, table);
    if (d.kind == DefKind::Bool && in_.accept("<->")) {
      d.body = p.formula();
    } else if (d.kind == DefKind::Real && in_.accept("=")) {
      d.body = p.term();
    } else if (d.kind == DefKind::HP && in_.accept("::=")) {
      d.body = p.program();
    }
    in_.expect(";");
    if (d.body && d.kind != DefKind::HP) {
      VarSet fv = free_vars(*d.body);
      VarSet params;
      for (const auto& x : d.params) params.insert(x);
      if (!fv.subset_of(params))
        throw ParseError("definition of " + d.name + " mentions variables " + (fv - params).str() +
                             " that are not parameters",
                         at.line, at.column);
    }
    if (d.body && signature(*d.body).count(d.symbol()))
      throw ParseError("definition of " + d.name + " is recursive", at.line, at.column);
    return d;
  }

  // Everything used must be declared, except arity-0 function and predicate symbols,
  // which stand for not-yet-modeled constants and assumptions.
  void check_symbols(const ArchiveEntry& e, const Expr& f, bool declared_vars, const std::string& where,
                     const Token& at) {
    SymbolTable table = e.symbols();
    for (const auto& s : signature(f)) {
      auto it = table.find(s.name);
      if (it == table.end()) {
        if (s.kind != SymbolKind::Program && s.arity == 0 && s.space == Space::Applied) continue;
        throw ParseError(where + ": undeclared symbol " + s.name, at.line, at.column);
      }
      if (it->second.kind != s.kind || it->second.arity != s.arity)
        throw ParseError(where + ": symbol " + s.name + " used inconsistently with its declaration", at.line,
                         at.column);
    }
    if (!declared_vars) return;
    for (const auto& x : all_vars(f)) {
      bool ok = false;
      for (const auto& y : e.program_variables) ok = ok || y == x.base();
      if (!ok) throw ParseError(where + ": undeclared variable " + x.base().str(), at.line, at.column);
    }
  }

  TokenCursor in_;
  std::map<std::string, Token> def_pos_;
};

std::string quote(const std::string& s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += c;
  }
  return r + "\"";
}

}  // namespace

Archive parse_archive(std::string_view text) { return ArchiveParser(text).run(); }

std::string print(const ArchiveEntry& e) {
  std::string out;
  bool wrapped = !e.name.empty();
  std::string ind = wrapped ? "  " : "";
  if (wrapped) out += std::string(e.kind == EntryKind::Lemma ? "Lemma " : "Theorem ") + quote(e.name) + "\n";
  if (!e.definitions.empty()) {
    out += ind + "Definitions\n";
    for (const auto& d : e.definitions) {
      out += ind + "  ";
      switch (d.kind) {
        case DefKind::Bool: out += "Bool "; break;
        case DefKind::Real: out += "Real "; break;
        case DefKind::HP: out += "HP "; break;
      }
      out += d.name;
      if (d.kind != DefKind::HP) {
        out += "(";
        for (std::size_t k = 0; k < d.params.size(); ++k) out += (k ? ", Real " : "Real ") + d.params[k].str();
        out += ")";
      }
      if (d.body) {
        switch (d.kind) {
          case DefKind::Bool: out += " <-> " + print(*d.body); break;
          case DefKind::Real: out += " = " + print(*d.body); break;
          case DefKind::HP: out += " ::= { " + print(*d.body) + " }"; break;
        }
      }
      out += ";\n";
    }
    out += ind + "End.\n";
  }
  if (!e.program_variables.empty()) {
    out += ind + "ProgramVariables";
    for (const auto& x : e.program_variables) out += " Real " + x.str() + ";";
    out += " End.\n";
  }
  out += ind + "Problem " + print(e.problem) + " End.\n";
  for (const auto& t : e.tactics) out += ind + "Tactic " + quote(t.name) + " " + print(*t.tactic) + " End.\n";
  if (wrapped) out += "End.\n";
  return out;
}

std::string print(const Archive& a) {
  std::string out;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (i) out += "\n";
    out += print(a.entries[i]);
  }
  return out;
}

}  // namespace usp
