#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace dabc::pyparse {

enum class TokenKind { name, number, string, op, newline, indent, dedent, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string_view text;
  int line = 0;      // 1-based, first line of the token
  int column = 0;    // 1-based
  int end_line = 0;  // differs from line only for multi-line strings
  std::size_t begin = 0;
  std::size_t end = 0;
  bool fstring = false;

  bool is_op(std::string_view s) const { return kind == TokenKind::op && text == s; }
  bool is_name(std::string_view s) const { return kind == TokenKind::name && text == s; }
};

/// Python 3 hard keywords (soft keywords such as `match` lex as names).
bool is_keyword(std::string_view word);

/// Tokenizes Python 3 source into the usual stream with NEWLINE/INDENT/DEDENT.
/// Comments and blank lines produce no tokens. Lines are numbered from
/// `first_line`. Throws dabc::SyntaxError on malformed input.
std::vector<Token> tokenize(std::string_view source, int first_line = 1);

}  // namespace dabc::pyparse
