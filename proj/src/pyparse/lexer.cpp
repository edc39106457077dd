#include "dabc/pyparse/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <string>

#include "dabc/util/error.hpp"

namespace dabc::pyparse {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",   "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",     "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",    "while",  "with",  "yield"};

constexpr std::array<std::string_view, 4> kOps3 = {"**=", "//=", ">>=", "<<="};
constexpr std::array<std::string_view, 20> kOps2 = {"->", ":=", "**", "//", "<<", ">>", "<=",
                                                    ">=", "==", "!=", "+=", "-=", "*=", "/=",
                                                    "%=", "&=", "|=", "^=", "@=", "<>"};
constexpr std::string_view kOps1 = "()[]{},:.;@=+-*/%&|^~<>";

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view word) {
  if (word.size() > 2) return false;
  bool r = false, b = false, f = false, u = false;
  for (char ch : word) {
    switch (std::tolower(static_cast<unsigned char>(ch))) {
      case 'r':
        if (r) return false;
        r = true;
        break;
      case 'b':
        if (b) return false;
        b = true;
        break;
      case 'f':
        if (f) return false;
        f = true;
        break;
      case 'u':
        if (u) return false;
        u = true;
        break;
      default:
        return false;
    }
  }
  if (u && (r || b || f)) return false;
  if (b && f) return false;
  return true;
}

class Lexer {
 public:
  Lexer(std::string_view src, int first_line) : src_(src), line_(first_line) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    bool at_line_start = true;
    bool line_has_tokens = false;
    while (true) {
      if (at_line_start && brackets_.empty()) {
        if (!handle_indentation()) break;  // EOF
        at_line_start = false;
        if (pos_ >= src_.size()) break;
      }
      if (pos_ >= src_.size()) break;
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\f') {
        ++pos_;
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
        continue;
      }
      if (c == '\\') {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && src_[p] == '\r') ++p;
        if (p < src_.size() && src_[p] == '\n') {
          pos_ = p + 1;
          new_line();
          continue;
        }
        if (p >= src_.size()) fail("unexpected end of file after line continuation");
        fail("unexpected character after line continuation character");
      }
      if (c == '\n' || c == '\r') {
        consume_newline();
        if (brackets_.empty()) {
          if (line_has_tokens) push(TokenKind::newline, pos_, pos_, line_ - 1, 0);
          at_line_start = true;
          line_has_tokens = false;
        }
        continue;
      }
      line_has_tokens = true;
      const auto uc = static_cast<unsigned char>(c);
      if (ident_start(uc)) {
        lex_name();
      } else if (std::isdigit(uc) ||
                 (c == '.' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number();
      } else if (c == '"' || c == '\'') {
        lex_string(pos_, false);
      } else {
        lex_op();
      }
    }
    if (!brackets_.empty()) fail("unexpected EOF: unclosed '" + std::string(1, brackets_.back()) + "'");
    if (line_has_tokens) push(TokenKind::newline, src_.size(), src_.size(), line_, 0);
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(TokenKind::dedent, src_.size(), src_.size(), line_, 0);
    }
    push(TokenKind::end, src_.size(), src_.size(), line_, 0);
    return std::move(tokens_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(line_, static_cast<int>(pos_ - line_start_) + 1, msg);
  }

  void new_line() {
    ++line_;
    line_start_ = pos_;
  }

  void consume_newline() {
    if (src_[pos_] == '\r') {
      ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '\n') ++pos_;
    } else {
      ++pos_;
    }
    new_line();
  }

  void push(TokenKind kind, std::size_t b, std::size_t e, int line, int end_line, bool fstr = false) {
    Token t;
    t.kind = kind;
    t.begin = b;
    t.end = e;
    t.text = src_.substr(b, e - b);
    t.line = line;
    t.end_line = end_line ? end_line : line;
    t.column = static_cast<int>(b >= line_start_ ? b - line_start_ : 0) + 1;
    t.fstring = fstr;
    tokens_.push_back(t);
  }

  // Returns false at end of input.
  bool handle_indentation() {
    while (true) {
      std::size_t col = 0;
      std::size_t p = pos_;
      while (p < src_.size()) {
        const char c = src_[p];
        if (c == ' ') {
          ++col;
        } else if (c == '\t') {
          col = (col / 8 + 1) * 8;
        } else if (c == '\f') {
          col = 0;
        } else {
          break;
        }
        ++p;
      }
      if (p >= src_.size()) {
        pos_ = p;
        return false;
      }
      const char c = src_[p];
      if (c == '#' || c == '\n' || c == '\r') {
        pos_ = p;
        while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
        if (pos_ >= src_.size()) return false;
        consume_newline();
        continue;
      }
      if (c == '\\') {
        // continuation on an otherwise empty line joins with the next one
        std::size_t q = p + 1;
        if (q < src_.size() && src_[q] == '\r') ++q;
        if (q < src_.size() && src_[q] == '\n') {
          pos_ = q + 1;
          new_line();
          continue;
        }
      }
      pos_ = p;
      if (col > indents_.back()) {
        indents_.push_back(col);
        push(TokenKind::indent, pos_, pos_, line_, 0);
      } else {
        while (col < indents_.back()) {
          indents_.pop_back();
          push(TokenKind::dedent, pos_, pos_, line_, 0);
        }
        if (col != indents_.back()) fail("unindent does not match any outer indentation level");
      }
      return true;
    }
  }

  void lex_name() {
    const std::size_t b = pos_;
    while (pos_ < src_.size() && ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const auto word = src_.substr(b, pos_ - b);
    if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') && is_string_prefix(word)) {
      const bool f = word.find_first_of("fF") != std::string_view::npos;
      lex_string(b, f);
      return;
    }
    push(TokenKind::name, b, pos_, line_, 0);
  }

  void lex_number() {
    const std::size_t b = pos_;
    auto digit_run = [&](auto pred) {
      while (pos_ < src_.size() && (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    };
    auto is_dec = [](unsigned char c) { return std::isdigit(c) != 0; };
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() && std::strchr("xXoObB", src_[pos_ + 1]) && src_[pos_ + 1] != '\0') {
      pos_ += 2;
      digit_run([](unsigned char c) { return std::isxdigit(c) != 0; });
    } else {
      digit_run(is_dec);
      if (pos_ < src_.size() && src_[pos_] == '.') {
        ++pos_;
        digit_run(is_dec);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t p = pos_ + 1;
        if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
        if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
          pos_ = p;
          digit_run(is_dec);
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) ++pos_;
    }
    push(TokenKind::number, b, pos_, line_, 0);
  }

  // Scans one string literal whose opening quote is at pos_. Handles nested
  // replacement fields for f-strings, including same-quote nesting.
  void scan_string_body(bool fstring) {
    const char q = src_[pos_];
    const bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q;
    pos_ += triple ? 3 : 1;
    // each entry: bracket depth inside the expression part, or -1 while in a format spec
    std::vector<int> fields;
    while (true) {
      if (pos_ >= src_.size()) fail(triple ? "unterminated triple-quoted string literal" : "unterminated string literal");
      const char c = src_[pos_];
      if (c == '\n' || c == '\r') {
        if (!triple && fields.empty()) fail("unterminated string literal");
        consume_newline();
        continue;
      }
      const bool in_expr = !fields.empty() && fields.back() >= 0;
      if (in_expr) {
        if (c == '"' || c == '\'') {
          bool nested_f = false;
          for (std::size_t k = pos_; k > 0 && k + 2 >= pos_ && ident_char(static_cast<unsigned char>(src_[k - 1])); --k) {
            if (src_[k - 1] == 'f' || src_[k - 1] == 'F') nested_f = true;
          }
          scan_string_body(nested_f);
          continue;
        }
        if (c == '#') {
          ++pos_;
          continue;
        }
        if (c == '(' || c == '[' || c == '{') {
          ++fields.back();
        } else if ((c == ')' || c == ']') && fields.back() > 0) {
          --fields.back();
        } else if (c == '}') {
          if (fields.back() > 0) {
            --fields.back();
          } else {
            fields.pop_back();
          }
        } else if (c == ':' && fields.back() == 0) {
          if (!(pos_ + 1 < src_.size() && src_[pos_ + 1] == '=')) fields.back() = -1;
        } else if (c == '\\') {
          ++pos_;
        }
        ++pos_;
        continue;
      }
      if (c == '\\') {
        pos_ += 1;
        if (pos_ < src_.size()) {
          if (src_[pos_] == '\n' || src_[pos_] == '\r') {
            consume_newline();
          } else {
            ++pos_;
          }
        }
        continue;
      }
      if (fstring) {
        if (c == '{') {
          if (fields.empty() && pos_ + 1 < src_.size() && src_[pos_ + 1] == '{') {
            pos_ += 2;
            continue;
          }
          fields.push_back(0);
          ++pos_;
          continue;
        }
        if (c == '}') {
          if (fields.empty()) {
            pos_ += (pos_ + 1 < src_.size() && src_[pos_ + 1] == '}') ? 2 : 1;
          } else {
            fields.pop_back();
            ++pos_;
          }
          continue;
        }
      }
      if (c == q && fields.empty()) {
        if (!triple) {
          ++pos_;
          return;
        }
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q) {
          pos_ += 3;
          return;
        }
      }
      ++pos_;
    }
  }

  void lex_string(std::size_t token_begin, bool fstring) {
    const int start_line = line_;
    const std::size_t start_line_begin = line_start_;
    scan_string_body(fstring);
    Token t;
    t.kind = TokenKind::string;
    t.begin = token_begin;
    t.end = pos_;
    t.text = src_.substr(token_begin, pos_ - token_begin);
    t.line = start_line;
    t.end_line = line_;
    t.column = static_cast<int>(token_begin - start_line_begin) + 1;
    t.fstring = fstring;
    tokens_.push_back(t);
  }

  void lex_op() {
    const auto rest = src_.substr(pos_);
    std::size_t len = 0;
    if (rest.substr(0, 3) == "...") len = 3;
    for (auto op : kOps3) {
      if (len == 0 && rest.substr(0, 3) == op) len = 3;
    }
    for (auto op : kOps2) {
      if (len == 0 && rest.substr(0, 2) == op) len = 2;
    }
    if (len == 0 && kOps1.find(rest[0]) != std::string_view::npos) len = 1;
    if (len == 0 && rest[0] == '!') {
      fail("invalid syntax '!'");
    }
    if (len == 0) fail("invalid character '" + std::string(1, rest[0]) + "'");
    if (rest.substr(0, 2) == "<>") fail("invalid syntax '<>'");
    const char c = rest[0];
    if (len == 1) {
      if (c == '(' || c == '[' || c == '{') {
        brackets_.push_back(c);
      } else if (c == ')' || c == ']' || c == '}') {
        const char open = c == ')' ? '(' : (c == ']' ? '[' : '{');
        if (brackets_.empty()) fail("unmatched '" + std::string(1, c) + "'");
        if (brackets_.back() != open) fail("closing parenthesis '" + std::string(1, c) + "' does not match");
        brackets_.pop_back();
      }
    }
    push(TokenKind::op, pos_, pos_ + len, line_, 0);
    pos_ += len;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_;
  std::vector<std::size_t> indents_;
  std::vector<char> brackets_;
  std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source, int first_line) {
  return Lexer(source, first_line).run();
}

}  // namespace dabc::pyparse
