#include <algorithm>
#include <unordered_set>

#include "dabc/pyparse/lexer.hpp"
#include "dabc/pyparse/parsed_unit.hpp"
#include "dabc/util/error.hpp"
#include "dabc/util/text.hpp"

namespace dabc::pyparse {

std::string_view to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::positional_only:
      return "positional_only";
    case ParamKind::positional_or_keyword:
      return "positional_or_keyword";
    case ParamKind::keyword_only:
      return "keyword_only";
    case ParamKind::vararg:
      return "vararg";
    case ParamKind::kwvararg:
      return "kwvararg";
  }
  return "positional_or_keyword";
}

std::optional<ParamKind> param_kind_from_string(std::string_view s) {
  for (auto k : {ParamKind::positional_only, ParamKind::positional_or_keyword, ParamKind::keyword_only,
                 ParamKind::vararg, ParamKind::kwvararg}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

bool FunctionDef::has_decorator(std::string_view name) const {
  return std::find(decorators.begin(), decorators.end(), name) != decorators.end();
}

const ParamSpec* FunctionDef::find_param(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const std::string* CallSite::keyword(std::string_view name) const {
  for (const auto& [k, v] : keyword_args) {
    if (k == name) return &v;
  }
  return nullptr;
}

namespace {

struct ParseOutput {
  std::vector<ImportRecord> imports;
  std::vector<FunctionDef> defs;
  std::vector<ClassDef> classes;
  std::vector<CallSite> calls;
  int decisions = 0;
};

enum class ExprKind { other, name, attribute, call, string, constant };

struct Expr {
  ExprKind kind = ExprKind::other;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string_view terminal;  // name, attribute name, or a call's callee terminal
  int terminal_line = 0;
  int terminal_column = 0;
  std::size_t object_end = 0;  // attribute: end of the object expression
  bool plain_string = false;
  int first_line = 0;
  int last_line = 0;
};

struct Docstring {
  std::string text;
  LineRange lines;
};

// Body of a string token without prefix and quotes. No escape processing.
std::string string_body(std::string_view tok) {
  std::size_t i = 0;
  while (i < tok.size() && tok[i] != '"' && tok[i] != '\'') ++i;
  tok.remove_prefix(i);
  const std::size_t q = (tok.size() >= 6 && tok.substr(0, 3) == tok.substr(tok.size() - 3) &&
                         (tok.substr(0, 3) == "\"\"\"" || tok.substr(0, 3) == "'''"))
                            ? 3
                            : 1;
  if (tok.size() < 2 * q) return {};
  return std::string(tok.substr(q, tok.size() - 2 * q));
}

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> tokens, ParseOutput& out)
      : src_(src), toks_(std::move(tokens)), out_(out) {}

  void parse_module() {
    while (!at(TokenKind::end)) {
      if (at(TokenKind::newline)) {
        advance();
        continue;
      }
      parse_statement();
    }
  }

 private:
  struct Scope {
    bool is_class;
    std::string name;
  };

  struct Checkpoint {
    std::size_t pos, imports, defs, classes, calls, scopes;
    int decisions;
    std::size_t prev_end;
    int prev_line;
  };

  // ---- token helpers ----

  const Token& peek(std::size_t k = 0) const {
    const std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  bool at(TokenKind k) const { return peek().kind == k; }
  bool at_op(std::string_view s) const { return peek().is_op(s); }
  bool at_name(std::string_view s) const { return peek().is_name(s); }

  const Token& advance() {
    const Token& t = toks_[pos_];
    if (t.kind != TokenKind::end) ++pos_;
    if (t.kind != TokenKind::newline && t.kind != TokenKind::indent && t.kind != TokenKind::dedent &&
        t.kind != TokenKind::end) {
      prev_end_ = t.end;
      prev_line_ = t.end_line;
    }
    return t;
  }

  bool accept_op(std::string_view s) {
    if (!at_op(s)) return false;
    advance();
    return true;
  }
  bool accept_name(std::string_view s) {
    if (!at_name(s)) return false;
    advance();
    return true;
  }

  [[noreturn]] void error(const Token& t, const std::string& msg) const {
    throw SyntaxError(t.line, t.column, msg);
  }
  [[noreturn]] void unexpected() const {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::newline:
        error(t, "invalid syntax (unexpected end of line)");
      case TokenKind::indent:
        error(t, "unexpected indent");
      case TokenKind::dedent:
        error(t, "unexpected dedent");
      case TokenKind::end:
        error(t, "unexpected end of file");
      default:
        error(t, "invalid syntax near '" + std::string(t.text) + "'");
    }
  }

  const Token& expect_op(std::string_view s) {
    if (!at_op(s)) {
      if (at(TokenKind::newline) || at(TokenKind::end)) error(peek(), "expected '" + std::string(s) + "'");
      unexpected();
    }
    return advance();
  }
  const Token& expect_kind(TokenKind k) {
    if (!at(k)) {
      if (k == TokenKind::indent) error(peek(), "expected an indented block");
      unexpected();
    }
    return advance();
  }
  const Token& expect_keyword(std::string_view s) {
    if (!at_name(s)) unexpected();
    return advance();
  }
  const Token& expect_identifier() {
    const Token& t = peek();
    if (t.kind != TokenKind::name || is_keyword(t.text)) unexpected();
    return advance();
  }

  bool at_identifier() const { return peek().kind == TokenKind::name && !is_keyword(peek().text); }

  std::string slice(std::size_t b, std::size_t e) const { return std::string(src_.substr(b, e - b)); }

  Checkpoint save() const {
    return {pos_,        out_.imports.size(), out_.defs.size(), out_.classes.size(), out_.calls.size(),
            scopes_.size(), out_.decisions,   prev_end_,        prev_line_};
  }
  void restore(const Checkpoint& c) {
    pos_ = c.pos;
    out_.imports.resize(c.imports);
    out_.defs.resize(c.defs);
    out_.classes.resize(c.classes);
    out_.calls.resize(c.calls);
    scopes_.resize(c.scopes);
    out_.decisions = c.decisions;
    prev_end_ = c.prev_end;
    prev_line_ = c.prev_line;
  }

  static bool starts_expression(const Token& t) {
    switch (t.kind) {
      case TokenKind::name:
        if (!is_keyword(t.text)) return true;
        return t.text == "not" || t.text == "lambda" || t.text == "await" || t.text == "None" ||
               t.text == "True" || t.text == "False" || t.text == "yield";
      case TokenKind::number:
      case TokenKind::string:
        return true;
      case TokenKind::op:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
               t.text == "~" || t.text == "*" || t.text == "...";
      default:
        return false;
    }
  }

  bool end_of_simple() const { return at(TokenKind::newline) || at_op(";") || at(TokenKind::end); }

  // ---- statements ----

  std::optional<Docstring> parse_statement() {
    const Token& t = peek();
    if (t.is_op("@")) {
      parse_decorated();
      return std::nullopt;
    }
    if (t.kind == TokenKind::name) {
      const auto w = t.text;
      if (w == "def") {
        parse_funcdef({}, false);
        return std::nullopt;
      }
      if (w == "class") {
        parse_classdef({});
        return std::nullopt;
      }
      if (w == "if") {
        parse_if();
        return std::nullopt;
      }
      if (w == "while") {
        parse_while();
        return std::nullopt;
      }
      if (w == "for") {
        parse_for();
        return std::nullopt;
      }
      if (w == "try") {
        parse_try();
        return std::nullopt;
      }
      if (w == "with") {
        parse_with();
        return std::nullopt;
      }
      if (w == "async") {
        parse_async({});
        return std::nullopt;
      }
      if (w == "match" && try_parse_match()) return std::nullopt;
    }
    if (t.kind == TokenKind::indent) error(t, "unexpected indent");
    return parse_simple_statements();
  }

  std::optional<Docstring> parse_simple_statements() {
    std::optional<Docstring> doc = parse_small_statement();
    while (accept_op(";")) {
      if (at(TokenKind::newline) || at(TokenKind::end)) break;
      parse_small_statement();
    }
    if (at(TokenKind::end)) return doc;
    expect_kind(TokenKind::newline);
    return doc;
  }

  std::optional<Docstring> parse_small_statement() {
    const Token& t = peek();
    if (t.kind == TokenKind::name) {
      const auto w = t.text;
      if (w == "pass" || w == "break" || w == "continue") {
        advance();
        return std::nullopt;
      }
      if (w == "return") {
        advance();
        if (!end_of_simple()) parse_star_expressions();
        return std::nullopt;
      }
      if (w == "raise") {
        advance();
        if (!end_of_simple()) {
          parse_expression();
          if (accept_name("from")) parse_expression();
        }
        return std::nullopt;
      }
      if (w == "global" || w == "nonlocal") {
        advance();
        expect_identifier();
        while (accept_op(",")) expect_identifier();
        return std::nullopt;
      }
      if (w == "del") {
        advance();
        parse_star_expressions();
        return std::nullopt;
      }
      if (w == "assert") {
        advance();
        ++out_.decisions;
        parse_expression();
        if (accept_op(",")) parse_expression();
        return std::nullopt;
      }
      if (w == "import") {
        parse_import();
        return std::nullopt;
      }
      if (w == "from") {
        parse_from_import();
        return std::nullopt;
      }
      if (w == "type" && peek(1).kind == TokenKind::name && (peek(2).is_op("=") || peek(2).is_op("["))) {
        advance();
        advance();
        if (at_op("[")) skip_balanced();
        expect_op("=");
        parse_expression();
        return std::nullopt;
      }
    }
    return parse_expression_statement();
  }

  std::optional<Docstring> parse_expression_statement() {
    const std::size_t first_tok = pos_;
    const Expr e = at_name("yield") ? parse_yield() : parse_star_expressions();
    if (accept_op(":")) {
      parse_expression();
      if (accept_op("=")) parse_assign_rhs();
      return std::nullopt;
    }
    static const std::unordered_set<std::string_view> aug = {"+=", "-=",  "*=",  "/=",  "//=", "%=", "@=",
                                                             "&=", "|=", "^=", ">>=", "<<=", "**="};
    if (peek().kind == TokenKind::op && aug.count(peek().text)) {
      advance();
      parse_assign_rhs();
      return std::nullopt;
    }
    bool assigned = false;
    while (accept_op("=")) {
      assigned = true;
      parse_assign_rhs();
    }
    if (!assigned && e.kind == ExprKind::string && e.plain_string) {
      Docstring d;
      for (std::size_t i = first_tok; i < pos_; ++i) d.text += string_body(toks_[i].text);
      d.lines = {e.first_line, e.last_line};
      return d;
    }
    return std::nullopt;
  }

  void parse_assign_rhs() {
    if (at_name("yield")) {
      parse_yield();
    } else {
      parse_star_expressions();
    }
  }

  void skip_balanced() {
    int depth = 0;
    do {
      const Token& t = advance();
      if (t.kind == TokenKind::end) unexpected();
      if (t.is_op("(") || t.is_op("[") || t.is_op("{")) ++depth;
      if (t.is_op(")") || t.is_op("]") || t.is_op("}")) --depth;
    } while (depth > 0);
  }

  std::string parse_dotted_name() {
    std::string name(expect_identifier().text);
    while (at_op(".")) {
      advance();
      name += '.';
      name += expect_identifier().text;
    }
    return name;
  }

  void parse_import() {
    const int line = advance().line;
    do {
      ImportRecord rec;
      rec.line = line;
      rec.module_path = parse_dotted_name();
      if (accept_name("as")) rec.alias = std::string(expect_identifier().text);
      out_.imports.push_back(std::move(rec));
    } while (accept_op(","));
  }

  void parse_from_import() {
    const int line = advance().line;
    ImportRecord rec;
    rec.line = line;
    while (at_op(".") || at_op("...")) rec.module_path += advance().text;
    if (!at_name("import")) rec.module_path += parse_dotted_name();
    if (rec.module_path.empty()) unexpected();
    expect_keyword("import");
    if (accept_op("*")) {
      rec.star = true;
    } else {
      const bool paren = accept_op("(");
      do {
        if (paren && at_op(")")) break;
        ImportedName n;
        n.name = std::string(expect_identifier().text);
        if (accept_name("as")) n.alias = std::string(expect_identifier().text);
        rec.imported_names.push_back(std::move(n));
      } while (accept_op(","));
      if (paren) expect_op(")");
    }
    out_.imports.push_back(std::move(rec));
  }

  // Parses ':' and the suite; returns the docstring candidate of the body.
  std::optional<Docstring> parse_block() {
    expect_op(":");
    if (!at(TokenKind::newline)) return parse_simple_statements();
    advance();
    expect_kind(TokenKind::indent);
    std::optional<Docstring> doc = parse_statement();
    while (!at(TokenKind::dedent) && !at(TokenKind::end)) parse_statement();
    if (at(TokenKind::dedent)) advance();
    return doc;
  }

  void parse_if() {
    advance();
    ++out_.decisions;
    parse_named_expr();
    parse_block();
    while (at_name("elif")) {
      advance();
      ++out_.decisions;
      parse_named_expr();
      parse_block();
    }
    if (accept_name("else")) parse_block();
  }

  void parse_while() {
    advance();
    ++out_.decisions;
    parse_named_expr();
    parse_block();
    if (accept_name("else")) parse_block();
  }

  void parse_for() {
    advance();
    ++out_.decisions;
    parse_target_list();
    expect_keyword("in");
    parse_star_expressions();
    parse_block();
    if (accept_name("else")) parse_block();
  }

  void parse_try() {
    const Token& t = advance();
    parse_block();
    bool handled = false;
    while (at_name("except")) {
      advance();
      handled = true;
      ++out_.decisions;
      accept_op("*");
      if (!at_op(":")) {
        parse_expression();
        if (accept_name("as")) expect_identifier();
      }
      parse_block();
    }
    if (handled && accept_name("else")) parse_block();
    if (accept_name("finally")) {
      handled = true;
      parse_block();
    }
    if (!handled) error(t, "expected 'except' or 'finally' block");
  }

  void parse_with_item() {
    parse_expression();
    if (accept_name("as")) parse_star_target();
  }

  void parse_with() {
    advance();
    if (at_op("(")) {
      const Checkpoint cp = save();
      try {
        advance();
        do {
          if (at_op(")")) break;
          parse_with_item();
        } while (accept_op(","));
        expect_op(")");
        if (!at_op(":")) unexpected();
        parse_block();
        return;
      } catch (const SyntaxError&) {
        restore(cp);
      }
    }
    do {
      parse_with_item();
    } while (accept_op(","));
    parse_block();
  }

  void parse_async(std::vector<std::string> decorators) {
    advance();
    if (at_name("def")) {
      parse_funcdef(std::move(decorators), true);
    } else if (!decorators.empty()) {
      unexpected();
    } else if (at_name("for")) {
      parse_for();
    } else if (at_name("with")) {
      parse_with();
    } else {
      unexpected();
    }
  }

  void parse_decorated() {
    std::vector<std::string> decorators;
    while (accept_op("@")) {
      const Expr e = parse_named_expr();
      decorators.emplace_back(e.terminal);
      expect_kind(TokenKind::newline);
    }
    if (at_name("def")) {
      parse_funcdef(std::move(decorators), false);
    } else if (at_name("async")) {
      parse_async(std::move(decorators));
    } else if (at_name("class")) {
      parse_classdef(std::move(decorators));
    } else {
      unexpected();
    }
  }

  std::vector<ParamSpec> parse_params(bool lambda) {
    std::vector<ParamSpec> ps;
    bool kwonly = false;
    bool seen_slash = false;
    const std::string_view closer = lambda ? ":" : ")";
    auto add = [&](const Token& name_tok, ParamSpec p) {
      for (const auto& q : ps) {
        if (q.name == p.name) error(name_tok, "duplicate argument '" + p.name + "' in function definition");
      }
      ps.push_back(std::move(p));
    };
    auto annotation = [&](bool allow_star) {
      if (lambda || !accept_op(":")) return;
      if (allow_star && accept_op("*")) {
        parse_bitor();
      } else {
        parse_expression();
      }
    };
    while (!at_op(closer)) {
      if (at_op("/")) {
        const Token& t = advance();
        if (seen_slash || kwonly || ps.empty()) error(t, "invalid '/' in parameter list");
        seen_slash = true;
        for (auto& p : ps) p.kind = ParamKind::positional_only;
      } else if (at_op("*")) {
        const Token& t = advance();
        if (kwonly) error(t, "* argument may appear only once");
        kwonly = true;
        if (!at_op(",") && !at_op(closer)) {
          const Token& n = expect_identifier();
          annotation(true);
          add(n, ParamSpec{std::string(n.text), std::nullopt, ParamKind::vararg});
        }
      } else if (at_op("**")) {
        advance();
        const Token& n = expect_identifier();
        annotation(false);
        add(n, ParamSpec{std::string(n.text), std::nullopt, ParamKind::kwvararg});
        accept_op(",");
        if (!at_op(closer)) unexpected();
        break;
      } else {
        const Token& n = expect_identifier();
        annotation(false);
        ParamSpec p{std::string(n.text), std::nullopt,
                    kwonly ? ParamKind::keyword_only : ParamKind::positional_or_keyword};
        if (accept_op("=")) {
          const Expr d = parse_expression();
          p.default_expr = slice(d.begin, d.end);
        }
        add(n, std::move(p));
      }
      if (!accept_op(",")) break;
    }
    return ps;
  }

  std::optional<std::string> enclosing_class() const {
    if (!scopes_.empty() && scopes_.back().is_class) return scopes_.back().name;
    return std::nullopt;
  }

  void parse_funcdef(std::vector<std::string> decorators, bool is_async) {
    const Token& def_tok = advance();
    const Token& name = expect_identifier();
    if (at_op("[")) skip_balanced();
    expect_op("(");
    auto params = parse_params(false);
    expect_op(")");
    if (accept_op("->")) parse_expression();

    const std::size_t slot = out_.defs.size();
    out_.defs.emplace_back();
    {
      FunctionDef& fd = out_.defs[slot];
      fd.function_name = std::string(name.text);
      fd.class_name = enclosing_class();
      fd.params = std::move(params);
      fd.decorators = std::move(decorators);
      fd.is_async = is_async;
      fd.span.first = def_tok.line;
    }
    scopes_.push_back({false, std::string(name.text)});
    auto doc = parse_block();
    scopes_.pop_back();
    FunctionDef& fd = out_.defs[slot];
    fd.span.last = prev_line_;
    if (doc) {
      fd.docstring = std::move(doc->text);
      fd.docstring_lines = doc->lines;
    }
  }

  void parse_classdef(std::vector<std::string> /*decorators*/) {
    const Token& class_tok = advance();
    const Token& name = expect_identifier();
    if (at_op("[")) skip_balanced();
    std::vector<std::string> bases;
    if (accept_op("(")) {
      while (!at_op(")")) {
        if (accept_op("*") || accept_op("**")) {
          parse_expression();
        } else if (at_identifier() && peek(1).is_op("=")) {
          advance();
          advance();
          parse_expression();
        } else {
          const Expr e = parse_expression();
          bases.push_back(slice(e.begin, e.end));
        }
        if (!accept_op(",")) break;
      }
      expect_op(")");
    }
    const std::size_t slot = out_.classes.size();
    out_.classes.emplace_back();
    out_.classes[slot].name = std::string(name.text);
    out_.classes[slot].bases = std::move(bases);
    out_.classes[slot].span.first = class_tok.line;
    scopes_.push_back({true, std::string(name.text)});
    auto doc = parse_block();
    scopes_.pop_back();
    ClassDef& cd = out_.classes[slot];
    cd.span.last = prev_line_;
    if (doc) {
      cd.docstring = std::move(doc->text);
      cd.docstring_lines = doc->lines;
    }
  }

  // `match` is a soft keyword: commit only once `match <subject>: NEWLINE INDENT case` is seen.
  bool try_parse_match() {
    const Checkpoint cp = save();
    try {
      advance();
      if (at_op("=") || at_op(".") || end_of_simple()) throw SyntaxError(0, 0, "not a match statement");
      const Expr subject = parse_star_named_expression();
      (void)subject;
      while (accept_op(",")) {
        if (at_op(":")) break;
        parse_star_named_expression();
      }
      expect_op(":");
      expect_kind(TokenKind::newline);
      expect_kind(TokenKind::indent);
      if (!at_name("case")) throw SyntaxError(0, 0, "not a match statement");
    } catch (const SyntaxError&) {
      restore(cp);
      return false;
    }
    while (at_name("case")) {
      advance();
      skip_case_pattern();
      parse_block();
    }
    if (at(TokenKind::dedent)) {
      advance();
    } else if (!at(TokenKind::end)) {
      unexpected();
    }
    return true;
  }

  void skip_case_pattern() {
    int depth = 0;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::end || t.kind == TokenKind::newline) unexpected();
      if (depth == 0 && t.is_op(":")) return;
      if (depth == 0 && t.is_name("if")) {
        advance();
        parse_named_expr();
        if (!at_op(":")) unexpected();
        return;
      }
      if (t.is_op("(") || t.is_op("[") || t.is_op("{")) ++depth;
      if (t.is_op(")") || t.is_op("]") || t.is_op("}")) --depth;
      advance();
    }
  }

  // ---- targets ----

  void parse_star_target() {
    if (accept_op("*")) {
      parse_bitor();
      return;
    }
    parse_bitor();
  }

  void parse_target_list() {
    parse_star_target();
    while (accept_op(",")) {
      if (at_name("in") || at_op("=")) break;
      parse_star_target();
    }
  }

  // ---- expressions ----

  Expr merge(const Expr& left) const {
    Expr e;
    e.kind = ExprKind::other;
    e.begin = left.begin;
    e.end = prev_end_;
    e.first_line = left.first_line;
    e.last_line = prev_line_;
    return e;
  }

  Expr parse_star_expressions() {
    Expr first = parse_star_expression();
    if (!at_op(",")) return first;
    while (accept_op(",")) {
      if (!starts_expression(peek())) break;
      parse_star_expression();
    }
    return merge(first);
  }

  Expr parse_star_expression() {
    if (at_op("*")) {
      const Token& t = advance();
      Expr inner = parse_bitor();
      Expr e = merge(inner);
      e.begin = t.begin;
      e.first_line = t.line;
      return e;
    }
    return parse_expression();
  }

  Expr parse_star_named_expression() {
    if (at_op("*")) return parse_star_expression();
    return parse_named_expr();
  }

  Expr parse_named_expr() {
    if (at_identifier() && peek(1).is_op(":=")) {
      const Token& t = advance();
      advance();
      parse_expression();
      Expr e;
      e.begin = t.begin;
      e.first_line = t.line;
      return merge(e);
    }
    return parse_expression();
  }

  Expr parse_expression() {
    if (at_name("lambda")) return parse_lambda();
    Expr e = parse_disjunction();
    if (at_name("if")) {
      advance();
      ++out_.decisions;
      parse_disjunction();
      expect_keyword("else");
      parse_expression();
      return merge(e);
    }
    return e;
  }

  Expr parse_lambda() {
    const Token& t = advance();
    parse_params(true);
    expect_op(":");
    parse_expression();
    Expr e;
    e.begin = t.begin;
    e.first_line = t.line;
    return merge(e);
  }

  Expr parse_yield() {
    const Token& t = advance();
    if (accept_name("from")) {
      parse_expression();
    } else if (starts_expression(peek())) {
      parse_star_expressions();
    }
    Expr e;
    e.begin = t.begin;
    e.first_line = t.line;
    return merge(e);
  }

  Expr parse_disjunction() {
    Expr e = parse_conjunction();
    bool any = false;
    while (at_name("or")) {
      advance();
      ++out_.decisions;
      parse_conjunction();
      any = true;
    }
    return any ? merge(e) : e;
  }

  Expr parse_conjunction() {
    Expr e = parse_inversion();
    bool any = false;
    while (at_name("and")) {
      advance();
      ++out_.decisions;
      parse_inversion();
      any = true;
    }
    return any ? merge(e) : e;
  }

  Expr parse_inversion() {
    if (at_name("not")) {
      const Token& t = advance();
      parse_inversion();
      Expr e;
      e.begin = t.begin;
      e.first_line = t.line;
      return merge(e);
    }
    return parse_comparison();
  }

  bool at_comparison_op() const {
    const Token& t = peek();
    if (t.kind == TokenKind::op)
      return t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" || t.text == "<=" || t.text == "!=";
    if (t.is_name("in") || t.is_name("is")) return true;
    return t.is_name("not") && peek(1).is_name("in");
  }

  Expr parse_comparison() {
    Expr e = parse_bitor();
    bool any = false;
    while (at_comparison_op()) {
      if (at_name("not")) {
        advance();
        advance();
      } else if (at_name("is")) {
        advance();
        accept_name("not");
      } else {
        advance();
      }
      parse_bitor();
      any = true;
    }
    return any ? merge(e) : e;
  }

  template <typename Next>
  Expr binary(std::initializer_list<std::string_view> ops, Next next) {
    Expr e = (this->*next)();
    bool any = false;
    while (peek().kind == TokenKind::op &&
           std::find(ops.begin(), ops.end(), peek().text) != ops.end()) {
      advance();
      (this->*next)();
      any = true;
    }
    return any ? merge(e) : e;
  }

  Expr parse_bitor() { return binary({"|"}, &Parser::parse_bitxor); }
  Expr parse_bitxor() { return binary({"^"}, &Parser::parse_bitand); }
  Expr parse_bitand() { return binary({"&"}, &Parser::parse_shift); }
  Expr parse_shift() { return binary({"<<", ">>"}, &Parser::parse_arith); }
  Expr parse_arith() { return binary({"+", "-"}, &Parser::parse_term); }
  Expr parse_term() { return binary({"*", "/", "//", "%", "@"}, &Parser::parse_factor); }

  Expr parse_factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      const Token& t = advance();
      parse_factor();
      Expr e;
      e.begin = t.begin;
      e.first_line = t.line;
      return merge(e);
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr e;
    if (at_name("await")) {
      const Token& t = advance();
      parse_primary();
      e.begin = t.begin;
      e.first_line = t.line;
      e = merge(e);
    } else {
      e = parse_primary();
    }
    if (accept_op("**")) {
      parse_factor();
      return merge(e);
    }
    return e;
  }

  Expr parse_primary() {
    Expr e = parse_atom();
    while (true) {
      if (at_op(".")) {
        advance();
        const Token& n = peek();
        if (n.kind != TokenKind::name) unexpected();
        advance();
        Expr a;
        a.kind = ExprKind::attribute;
        a.begin = e.begin;
        a.first_line = e.first_line;
        a.object_end = e.end;
        a.end = n.end;
        a.last_line = n.line;
        a.terminal = n.text;
        a.terminal_line = n.line;
        a.terminal_column = n.column;
        e = a;
      } else if (at_op("(")) {
        e = parse_call(e);
      } else if (at_op("[")) {
        advance();
        parse_slices();
        expect_op("]");
        e = merge(e);
      } else {
        return e;
      }
    }
  }

  void parse_slices() {
    do {
      if (at_op("]")) break;
      parse_slice();
    } while (accept_op(","));
  }

  void parse_slice() {
    if (at_op("*")) {
      parse_star_expression();
      return;
    }
    if (!at_op(":")) {
      parse_named_expr();
      if (!at_op(":")) return;
    }
    advance();
    if (starts_expression(peek())) parse_expression();
    if (accept_op(":")) {
      if (starts_expression(peek())) parse_expression();
    }
  }

  bool at_comp_for() const { return at_name("for") || (at_name("async") && peek(1).is_name("for")); }

  void parse_comp_for() {
    while (at_comp_for()) {
      accept_name("async");
      expect_keyword("for");
      parse_target_list();
      expect_keyword("in");
      parse_disjunction();
      while (at_name("if")) {
        advance();
        ++out_.decisions;
        parse_disjunction();
      }
    }
  }

  Expr parse_call(const Expr& callee) {
    advance();  // (
    const bool emit = callee.kind == ExprKind::name || callee.kind == ExprKind::attribute;
    const std::size_t slot = out_.calls.size();
    if (emit) out_.calls.emplace_back();
    CallSite cs;
    while (!at_op(")")) {
      if (at_op("*")) {
        advance();
        if (!cs.star_args_position) cs.star_args_position = cs.positional_args.size();
        cs.has_star_args = true;
        parse_expression();
      } else if (at_op("**")) {
        advance();
        cs.has_star_kwargs = true;
        parse_expression();
      } else if (at_identifier() && peek(1).is_op("=")) {
        const Token& k = advance();
        advance();
        const Expr v = parse_expression();
        const std::string key(k.text);
        if (cs.keyword(key)) error(k, "keyword argument repeated: " + key);
        cs.keyword_args.emplace_back(key, slice(v.begin, v.end));
      } else {
        const Expr v = parse_named_expr();
        if (at_comp_for()) parse_comp_for();
        cs.positional_args.push_back(slice(v.begin, prev_end_));
      }
      if (!accept_op(",")) break;
    }
    expect_op(")");
    if (emit) {
      cs.callee_name = std::string(callee.terminal);
      if (callee.kind == ExprKind::attribute) cs.receiver_text = slice(callee.begin, callee.object_end);
      cs.location.line = callee.terminal_line;
      cs.location.column = callee.terminal_column;
      out_.calls[slot] = std::move(cs);
    }
    Expr e = merge(callee);
    e.kind = ExprKind::call;
    e.terminal = callee.terminal;
    return e;
  }

  Expr parse_atom() {
    const Token& t = peek();
    Expr e;
    e.begin = t.begin;
    e.first_line = t.line;
    switch (t.kind) {
      case TokenKind::name: {
        if (is_keyword(t.text)) {
          if (t.text == "None" || t.text == "True" || t.text == "False") {
            advance();
            e.kind = ExprKind::constant;
            e.end = t.end;
            e.last_line = t.line;
            return e;
          }
          unexpected();
        }
        advance();
        e.kind = ExprKind::name;
        e.end = t.end;
        e.last_line = t.line;
        e.terminal = t.text;
        e.terminal_line = t.line;
        e.terminal_column = t.column;
        return e;
      }
      case TokenKind::number:
        advance();
        e.kind = ExprKind::constant;
        e.end = t.end;
        e.last_line = t.line;
        return e;
      case TokenKind::string: {
        bool plain = true;
        while (at(TokenKind::string)) {
          if (peek().fstring) plain = false;
          advance();
        }
        e.kind = ExprKind::string;
        e.plain_string = plain;
        e.end = prev_end_;
        e.last_line = prev_line_;
        return e;
      }
      case TokenKind::op:
        if (t.text == "(") return parse_paren();
        if (t.text == "[") return parse_list();
        if (t.text == "{") return parse_brace();
        if (t.text == "...") {
          advance();
          e.kind = ExprKind::constant;
          e.end = t.end;
          e.last_line = t.line;
          return e;
        }
        unexpected();
      default:
        unexpected();
    }
  }

  Expr parse_paren() {
    const Token& open = advance();
    Expr e;
    e.begin = open.begin;
    e.first_line = open.line;
    if (accept_op(")")) return merge(e);
    if (at_name("yield")) {
      parse_yield();
      expect_op(")");
      return merge(e);
    }
    Expr inner = parse_star_named_expression();
    if (at_comp_for()) {
      parse_comp_for();
      expect_op(")");
      return merge(e);
    }
    if (at_op(",")) {
      while (accept_op(",")) {
        if (at_op(")")) break;
        parse_star_named_expression();
      }
      expect_op(")");
      return merge(e);
    }
    expect_op(")");
    // keep the inner kind so `(f)(x)` and `("doc")` behave like their contents
    inner.begin = open.begin;
    inner.end = prev_end_;
    inner.first_line = open.line;
    inner.last_line = prev_line_;
    if (inner.kind == ExprKind::string) inner.plain_string = false;
    return inner;
  }

  Expr parse_list() {
    const Token& open = advance();
    Expr e;
    e.begin = open.begin;
    e.first_line = open.line;
    if (accept_op("]")) return merge(e);
    parse_star_named_expression();
    if (at_comp_for()) {
      parse_comp_for();
    } else {
      while (accept_op(",")) {
        if (at_op("]")) break;
        parse_star_named_expression();
      }
    }
    expect_op("]");
    return merge(e);
  }

  void parse_dict_or_set_item(bool& is_dict, bool first) {
    if (accept_op("**")) {
      if (!first && !is_dict) unexpected();
      is_dict = true;
      parse_bitor();
      return;
    }
    if (at_op("*")) {
      if (!first && is_dict) unexpected();
      parse_star_expression();
      return;
    }
    parse_named_expr();
    if (first && at_op(":")) is_dict = true;
    if (is_dict) {
      expect_op(":");
      parse_expression();
    }
  }

  Expr parse_brace() {
    const Token& open = advance();
    Expr e;
    e.begin = open.begin;
    e.first_line = open.line;
    if (accept_op("}")) return merge(e);
    bool is_dict = false;
    parse_dict_or_set_item(is_dict, true);
    if (at_comp_for()) {
      parse_comp_for();
    } else {
      while (accept_op(",")) {
        if (at_op("}")) break;
        parse_dict_or_set_item(is_dict, false);
      }
    }
    expect_op("}");
    return merge(e);
  }

  std::string_view src_;
  std::vector<Token> toks_;
  ParseOutput& out_;
  std::size_t pos_ = 0;
  std::size_t prev_end_ = 0;
  int prev_line_ = 0;
  std::vector<Scope> scopes_;
};

struct Fragment {
  ParseOutput out;
  std::set<std::string> identifiers;
};

Fragment parse_fragment(std::string_view code, int first_line) {
  Fragment f;
  auto tokens = tokenize(code, first_line);
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::name && !is_keyword(t.text)) f.identifiers.emplace(t.text);
  }
  Parser p(code, std::move(tokens), f.out);
  p.parse_module();
  return f;
}

void append(ParsedUnit& pu, Fragment&& f) {
  for (auto& i : f.out.imports) pu.imports.push_back(std::move(i));
  for (auto& d : f.out.defs) pu.defs.push_back(std::move(d));
  for (auto& c : f.out.classes) pu.classes.push_back(std::move(c));
  for (auto& c : f.out.calls) pu.calls.push_back(std::move(c));
  pu.identifiers.merge(f.identifiers);
  pu.decision_points += f.out.decisions;
}

// Byte range of lines [first, last] (1-based, inclusive) in code.
std::string_view line_range(std::string_view code, int first, int last) {
  std::size_t begin = 0;
  int line = 1;
  while (line < first && begin < code.size()) {
    const auto nl = code.find('\n', begin);
    if (nl == std::string_view::npos) return {};
    begin = nl + 1;
    ++line;
  }
  std::size_t end = begin;
  while (line <= last && end < code.size()) {
    const auto nl = code.find('\n', end);
    end = nl == std::string_view::npos ? code.size() : nl + 1;
    ++line;
  }
  return code.substr(begin, end - begin);
}

}  // namespace

ParsedUnit parse_unit(const SourceUnit& unit) {
  ParsedUnit pu;
  pu.unit = unit;
  try {
    append(pu, parse_fragment(unit.code, 1));
  } catch (const SyntaxError& whole) {
    if (unit.kind != UnitKind::notebook || unit.cell_map.empty()) throw;
    pu = ParsedUnit{};
    pu.unit = unit;
    pu.partial = true;
    std::size_t ok = 0;
    for (const auto& cell : unit.cell_map) {
      try {
        append(pu, parse_fragment(line_range(unit.code, cell.first_line, cell.last_line), cell.first_line));
        ++ok;
      } catch (const SyntaxError& e) {
        pu.warnings.push_back("cell " + std::to_string(cell.cell_index) + ": " + e.what());
      }
    }
    if (ok == 0) throw whole;
  }

  std::unordered_set<std::string> local;
  for (const auto& d : pu.defs) local.insert(d.function_name);
  for (const auto& c : pu.classes) local.insert(c.name);
  const std::string path = unit.path.generic_string();
  std::vector<CallSite> external;
  for (auto& c : pu.calls) {
    c.location.path = path;
    c.location.cell = unit.cell_of_line(c.location.line);
    if (local.count(c.callee_name)) {
      pu.internal_calls.push_back(std::move(c));
    } else {
      external.push_back(std::move(c));
    }
  }
  pu.calls = std::move(external);
  return pu;
}

ParsedUnit parse_code(std::string_view code, std::string path) {
  SourceUnit u;
  u.path = std::move(path);
  u.kind = UnitKind::script;
  u.code = std::string(code);
  return parse_unit(u);
}

bool unit_imports_library(const ParsedUnit& parsed, std::string_view library_token, ImportMatch mode) {
  if (library_token.empty()) return false;
  for (const auto& imp : parsed.imports) {
    std::string_view mp = imp.module_path;
    if (mode == ImportMatch::substring) {
      if (mp.find(library_token) != std::string_view::npos) return true;
      continue;
    }
    std::size_t start = 0;
    while (start <= mp.size()) {
      const auto dot = mp.find('.', start);
      const auto part = mp.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
      if (part == library_token) return true;
      if (dot == std::string_view::npos) break;
      start = dot + 1;
    }
  }
  return false;
}

}  // namespace dabc::pyparse
