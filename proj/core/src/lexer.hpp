#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "usp/parser.hpp"

namespace usp::detail {

enum class Tok { Ident, Number, String, BackString, Punct, KwEnd, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;      // byte offset of token start
  std::size_t end_offset = 0;  // byte offset one past token end
};

// Splits concrete syntax into tokens. Unicode operators are mapped to their ASCII
// spelling; comments and {|...|} taboo annotations are dropped.
std::vector<Token> tokenize(std::string_view text);

}  // namespace usp::detail
