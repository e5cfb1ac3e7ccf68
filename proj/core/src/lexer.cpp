#include "lexer.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace usp::detail {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 14> kUnicode{{
    {"↔", "<->"},
    {"→", "->"},
    {"¬", "!"},
    {"∧", "&"},
    {"∨", "|"},
    {"∪", "++"},
    {"≥", ">="},
    {"≤", "<="},
    {"≠", "!="},
    {"∀", "\\forall"},
    {"∃", "\\exists"},
    {"⊢", "==>"},
    {"·", "."},
    {"′", "'"},
}};

constexpr std::array<std::string_view, 14> kMulti{
    "<->", "==>", "::=", "->", "<=", ">=", "!=", "==", ":=", "::", "~>", "++", "&&", "||"};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = column_;
      t.offset = pos_;
      if (pos_ >= text_.size()) {
        t.kind = Tok::Eof;
        t.end_offset = pos_;
        out.push_back(t);
        return out;
      }
      lex_one(t);
      t.end_offset = pos_;
      if (!t.text.empty() || t.kind != Tok::Punct) out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, column_); }

  char peek(std::size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
        ++column_;
      }
      ++pos_;
    }
  }

  bool starts_with(std::string_view s) const { return text_.substr(pos_).substr(0, s.size()) == s; }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (starts_with("/*")) {
        std::size_t close = text_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) fail("unterminated comment");
        advance(close + 2 - pos_);
      } else if (starts_with("{|")) {
        std::size_t close = text_.find("|}", pos_ + 2);
        if (close == std::string_view::npos) fail("unterminated {| |} annotation");
        advance(close + 2 - pos_);
      } else {
        return;
      }
    }
  }

  void lex_one(Token& t) {
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      t.text = std::string(text_.substr(start, pos_ - start));
      if (t.text == "End" && peek() == '.') {
        advance();
        t.kind = Tok::KwEnd;
        t.text = "End.";
        return;
      }
      t.kind = Tok::Ident;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (std::isdigit(static_cast<unsigned char>(peek(1))) ||
           ((peek(1) == '-' || peek(1) == '+') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
        advance(2);
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      t.kind = Tok::Number;
      t.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (c == '"' || c == '`') {
      char quote = c;
      advance();
      std::string s;
      while (pos_ < text_.size() && peek() != quote) {
        if (peek() == '\\' && quote == '"' && (peek(1) == '"' || peek(1) == '\\')) {
          s += peek(1);
          advance(2);
          continue;
        }
        s += peek();
        advance();
      }
      if (pos_ >= text_.size()) fail("unterminated string literal");
      advance();
      t.kind = quote == '"' ? Tok::String : Tok::BackString;
      t.text = std::move(s);
      return;
    }
    if (c == '\\') {
      std::size_t start = pos_;
      advance();
      while (std::isalpha(static_cast<unsigned char>(peek()))) advance();
      t.kind = Tok::Punct;
      t.text = std::string(text_.substr(start, pos_ - start));
      if (t.text != "\\forall" && t.text != "\\exists") fail("unknown keyword " + t.text);
      return;
    }
    for (const auto& [u, ascii] : kUnicode) {
      if (starts_with(u)) {
        advance(u.size());
        t.kind = Tok::Punct;
        t.text = std::string(ascii);
        return;
      }
    }
    if (c == '.' && peek(1) == '_' && std::isdigit(static_cast<unsigned char>(peek(2)))) {
      std::size_t start = pos_;
      advance(2);
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      t.kind = Tok::Punct;
      t.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    for (auto m : kMulti) {
      if (starts_with(m)) {
        advance(m.size());
        t.kind = Tok::Punct;
        t.text = std::string(m == "&&" ? "&" : m);
        return;
      }
    }
    static constexpr std::string_view singles = "()[]{}<>=!&|+-*/^',;?.:@~";
    if (singles.find(c) != std::string_view::npos) {
      advance();
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace usp::detail
