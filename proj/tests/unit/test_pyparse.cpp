#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dabc/pyparse/lexer.hpp"
#include "dabc/pyparse/parsed_unit.hpp"
#include "dabc/pyparse/source_unit.hpp"
#include "dabc/util/error.hpp"
#include "dabc/util/text.hpp"
#include "support.hpp"

using namespace dabc;
using namespace dabc::pyparse;

namespace {

std::string notebook(const std::vector<std::vector<std::string>>& code_cells) {
  std::string s = R"({"nbformat": 4, "nbformat_minor": 5, "metadata": {}, "cells": [)";
  for (std::size_t i = 0; i < code_cells.size(); ++i) {
    if (i) s += ",";
    s += R"({"cell_type": "code", "metadata": {}, "outputs": [], "source": [)";
    for (std::size_t j = 0; j < code_cells[i].size(); ++j) {
      if (j) s += ",";
      s += "\"";
      for (char c : code_cells[i][j]) {
        if (c == '\n') {
          s += "\\n";
        } else if (c == '"') {
          s += "\\\"";
        } else {
          s += c;
        }
      }
      s += "\"";
    }
    s += "]}";
  }
  return s + "]}";
}

const CallSite* find_call(const ParsedUnit& u, std::string_view name) {
  for (const auto& c : u.calls) {
    if (c.callee_name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST(LoadUnit, EmptyScript) {
  fixture::TempDir dir;
  fixture::spit(dir / "empty.py", "");
  const auto u = load_unit(dir / "empty.py");
  EXPECT_EQ(u.kind, UnitKind::script);
  EXPECT_EQ(u.code, "");
  EXPECT_TRUE(u.cell_map.empty());
}

TEST(LoadUnit, NotebookConcatenatesCodeCells) {
  const auto u = notebook_from_json("nb.ipynb", notebook({{"import pandas\n"}, {"pd.concat(dfs)\n"}}));
  EXPECT_EQ(u.kind, UnitKind::notebook);
  EXPECT_EQ(text::split_lines(u.code).size(), 2u);
  ASSERT_EQ(u.cell_map.size(), 2u);
  EXPECT_EQ(u.cell_map[0].first_line, 1);
  EXPECT_EQ(u.cell_map[0].last_line, 1);
  EXPECT_EQ(u.cell_map[1].first_line, 2);
  EXPECT_EQ(u.cell_map[1].last_line, 2);
  EXPECT_EQ(u.cell_of_line(2), 1);
}

TEST(LoadUnit, NotebookDropsMagics) {
  const auto u = notebook_from_json("nb.ipynb", notebook({{"%matplotlib inline\n", "x = 1\n"}}));
  EXPECT_EQ(text::trim(u.code), "x = 1");
}

TEST(LoadUnit, NotebookSkipsMarkdownAndStringSource) {
  const std::string js = R"({"nbformat": 4, "cells": [
    {"cell_type": "markdown", "source": "# title"},
    {"cell_type": "code", "source": "a = 1\nb = 2"},
    {"cell_type": "raw", "source": ["junk"]},
    {"cell_type": "code", "source": ["!ls\n", "  ?x\n", "c = 3"]}]})";
  const auto u = notebook_from_json("nb.ipynb", js);
  const auto lines = text::split_lines(u.code);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[2], "c = 3");
  ASSERT_EQ(u.cell_map.size(), 2u);
  EXPECT_EQ(u.cell_map[1].cell_index, 3);
}

TEST(LoadUnit, Errors) {
  fixture::TempDir dir;
  fixture::spit(dir / "bad.ipynb", "{not json");
  fixture::spit(dir / "x.txt", "");
  EXPECT_THROW(load_unit(dir / "bad.ipynb"), InputError);
  EXPECT_THROW(load_unit(dir / "x.txt"), InputError);
  EXPECT_THROW(load_unit(dir / "nope.py"), InputError);
}

TEST(LoadUnit, InvalidUtf8IsReplaced) {
  fixture::TempDir dir;
  fixture::spit(dir / "latin.py", "s = 'caf\xe9'\n");
  const auto u = load_unit(dir / "latin.py");
  EXPECT_NE(u.code.find("\xef\xbf\xbd"), std::string::npos);
  EXPECT_NO_THROW(parse_unit(u));
}

TEST(IsMagicLine, OnlyShellAndMagicPrefixes) {
  EXPECT_TRUE(is_magic_line("%timeit f()"));
  EXPECT_TRUE(is_magic_line("   !pip install x"));
  EXPECT_TRUE(is_magic_line("?len"));
  EXPECT_FALSE(is_magic_line("x = 1 % 2"));
  EXPECT_FALSE(is_magic_line("print('!')"));
}

// Lines starting with an identifier are never taken for magics.
TEST(IsMagicLine, PropertyIdentifierLinesSurvive) {
  std::mt19937_64 rng(7);
  const std::string first = "abcxyzABC_";
  const std::string rest = "abc_019 =+-*/%!?()[]'\".,";
  for (int i = 0; i < 2000; ++i) {
    std::string line(rng() % 4, ' ');
    line += first[rng() % first.size()];
    const auto n = rng() % 20;
    for (std::size_t k = 0; k < n; ++k) line += rest[rng() % rest.size()];
    ASSERT_FALSE(is_magic_line(line)) << line;
  }
}

TEST(ParseUnit, DefaultArguments) {
  const auto u = parse_code("def sum(a=0, b=0):\n    return a + b\n");
  ASSERT_EQ(u.defs.size(), 1u);
  const auto& d = u.defs[0];
  EXPECT_EQ(d.function_name, "sum");
  ASSERT_EQ(d.params.size(), 2u);
  EXPECT_EQ(d.params[0].name, "a");
  EXPECT_EQ(d.params[0].default_expr, "0");
  EXPECT_EQ(d.params[1].default_expr, "0");
  EXPECT_TRUE(u.calls.empty());
}

TEST(ParseUnit, ImportAndConstructorCall) {
  const auto u = parse_code("from sklearn.svm import SVC\nclf = SVC(random_state=42)\n");
  ASSERT_EQ(u.imports.size(), 1u);
  EXPECT_EQ(u.imports[0].module_path, "sklearn.svm");
  ASSERT_EQ(u.imports[0].imported_names.size(), 1u);
  EXPECT_EQ(u.imports[0].imported_names[0].name, "SVC");
  ASSERT_EQ(u.calls.size(), 1u);
  EXPECT_EQ(u.calls[0].callee_name, "SVC");
  ASSERT_EQ(u.calls[0].keyword_args.size(), 1u);
  EXPECT_EQ(u.calls[0].keyword_args[0], (std::pair<std::string, std::string>{"random_state", "42"}));
  EXPECT_EQ(u.calls[0].location.line, 2);
}

TEST(ParseUnit, PositionalOnly) {
  const auto u = parse_code("x = round(3.1415)\n");
  ASSERT_EQ(u.calls.size(), 1u);
  EXPECT_EQ(u.calls[0].positional_args, std::vector<std::string>{"3.1415"});
  EXPECT_TRUE(u.calls[0].keyword_args.empty());
}

TEST(ParseUnit, ImportForms) {
  const auto u = parse_code(
      "import numpy as np, os.path\n"
      "from . import sibling\n"
      "from ..pkg.mod import (a as b,\n    c)\n"
      "from x import *\n");
  ASSERT_EQ(u.imports.size(), 5u);
  EXPECT_EQ(u.imports[0].module_path, "numpy");
  EXPECT_EQ(u.imports[0].alias, "np");
  EXPECT_EQ(u.imports[1].module_path, "os.path");
  EXPECT_EQ(u.imports[2].module_path, ".");
  EXPECT_EQ(u.imports[3].module_path, "..pkg.mod");
  ASSERT_EQ(u.imports[3].imported_names.size(), 2u);
  EXPECT_EQ(u.imports[3].imported_names[0].alias, "b");
  EXPECT_TRUE(u.imports[4].star);
}

TEST(ParseUnit, ParamKinds) {
  const auto u = parse_code("def f(a, /, b=(1, 2), *args, c, d={'k': [1]}, **kw): pass\n");
  ASSERT_EQ(u.defs.size(), 1u);
  const auto& p = u.defs[0].params;
  ASSERT_EQ(p.size(), 6u);
  EXPECT_EQ(p[0].kind, ParamKind::positional_only);
  EXPECT_EQ(p[1].kind, ParamKind::positional_or_keyword);
  EXPECT_EQ(p[1].default_expr, "(1, 2)");
  EXPECT_EQ(p[2].kind, ParamKind::vararg);
  EXPECT_FALSE(p[2].default_expr);
  EXPECT_EQ(p[3].kind, ParamKind::keyword_only);
  EXPECT_EQ(p[4].default_expr, "{'k': [1]}");
  EXPECT_EQ(p[5].kind, ParamKind::kwvararg);
}

TEST(ParseUnit, AnnotatedAndBareStar) {
  const auto u = parse_code(
      "class K:\n"
      "    def __init__(self, x: int = 3, *, y: 'List[int]' = None) -> None:\n"
      "        self.x = x\n");
  ASSERT_EQ(u.defs.size(), 1u);
  const auto& d = u.defs[0];
  EXPECT_EQ(d.class_name, "K");
  ASSERT_EQ(d.params.size(), 3u);
  EXPECT_EQ(d.params[0].name, "self");
  EXPECT_EQ(d.params[1].default_expr, "3");
  EXPECT_EQ(d.params[2].kind, ParamKind::keyword_only);
  EXPECT_EQ(d.params[2].default_expr, "None");
}

TEST(ParseUnit, MultilineDefaultKeptVerbatim) {
  const auto u = parse_code("def f(a=dict(x=1,\n             y=2)):\n    pass\n");
  ASSERT_EQ(u.defs.size(), 1u);
  EXPECT_EQ(u.defs[0].params[0].default_expr, "dict(x=1,\n             y=2)");
}

TEST(ParseUnit, NestedAttributeCall) {
  const auto u = parse_code("import sklearn\ns = sklearn.model_selection.cross_val_score(m, X, y, cv=5)\n");
  const auto* c = find_call(u, "cross_val_score");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->receiver_text, "sklearn.model_selection");
  EXPECT_EQ(c->positional_args.size(), 3u);
  ASSERT_NE(c->keyword("cv"), nullptr);
  EXPECT_EQ(*c->keyword("cv"), "5");
}

TEST(ParseUnit, ChainedReceiverKeepsText) {
  const auto u = parse_code("pipe.named_steps['svc'].fit(X, y)\n");
  const auto* c = find_call(u, "fit");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->receiver_text, "pipe.named_steps['svc']");
}

TEST(ParseUnit, StarExpansions) {
  const auto u = parse_code("f(a, *rest, b, key=1, **extra)\ng(*xs)\n");
  const auto* f = find_call(u, "f");
  ASSERT_NE(f, nullptr);
  EXPECT_TRUE(f->has_star_args);
  EXPECT_TRUE(f->has_star_kwargs);
  EXPECT_EQ(f->star_args_position, 1u);
  const auto* g = find_call(u, "g");
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->star_args_position, 0u);
  EXPECT_FALSE(g->has_star_kwargs);
}

TEST(ParseUnit, LocalFunctionsAndClassesAreNotExternal) {
  const auto u = parse_code(
      "def helper(x):\n    return len(x)\n"
      "class Local:\n    pass\n"
      "helper([1])\nLocal()\nobj.helper()\nprint(1)\n");
  for (const auto& c : u.calls) {
    EXPECT_NE(c.callee_name, "helper");
    EXPECT_NE(c.callee_name, "Local");
  }
  EXPECT_NE(find_call(u, "len"), nullptr);
  EXPECT_NE(find_call(u, "print"), nullptr);
  EXPECT_EQ(u.internal_calls.size(), 3u);
}

TEST(ParseUnit, CallsInsideLambdasDecoratorsComprehensions) {
  const auto u = parse_code(
      "@register(name='x')\n"
      "def g():\n    pass\n"
      "h = lambda v: transform(v)\n"
      "ys = [score(v) for v in data if keep(v)]\n");
  EXPECT_NE(find_call(u, "register"), nullptr);
  EXPECT_NE(find_call(u, "transform"), nullptr);
  EXPECT_NE(find_call(u, "score"), nullptr);
  EXPECT_NE(find_call(u, "keep"), nullptr);
}

TEST(ParseUnit, FStringCallsIgnored) {
  const auto u = parse_code("x = f\"{compute(1)} and {y!r}\"\nz = g(f'{a[\"k\"]}')\n");
  EXPECT_EQ(find_call(u, "compute"), nullptr);
  EXPECT_NE(find_call(u, "g"), nullptr);
}

TEST(ParseUnit, DocstringsAndSpans) {
  const auto u = parse_code(
      "class A:\n"
      "    \"\"\"Class doc.\n\n    more\n    \"\"\"\n"
      "    def m(self, k=1):\n"
      "        '''Method doc.'''\n"
      "        return k\n");
  ASSERT_EQ(u.classes.size(), 1u);
  ASSERT_TRUE(u.classes[0].docstring_lines);
  EXPECT_EQ(u.classes[0].docstring_lines->first, 2);
  EXPECT_EQ(u.classes[0].docstring_lines->last, 5);
  ASSERT_EQ(u.defs.size(), 1u);
  EXPECT_EQ(u.defs[0].span.first, 6);
  EXPECT_EQ(u.defs[0].span.last, 8);
  ASSERT_TRUE(u.defs[0].docstring);
  EXPECT_NE(u.defs[0].docstring->find("Method doc."), std::string::npos);
}

TEST(ParseUnit, DecoratorNames) {
  const auto u = parse_code("class A:\n    @staticmethod\n    def s(x=1):\n        pass\n    @functools.wraps(f)\n    def w(self): pass\n");
  ASSERT_EQ(u.defs.size(), 2u);
  EXPECT_TRUE(u.defs[0].has_decorator("staticmethod"));
  EXPECT_TRUE(u.defs[1].has_decorator("wraps"));
}

TEST(ParseUnit, ModernSyntax) {
  const auto u = parse_code(
      "match cmd:\n"
      "    case {'a': x}:\n"
      "        act(x)\n"
      "    case _:\n"
      "        pass\n"
      "if (n := count(items)) > 3:\n    go()\n"
      "async def fetch(url, timeout=10):\n    await get(url)\n");
  EXPECT_NE(find_call(u, "act"), nullptr);
  EXPECT_NE(find_call(u, "count"), nullptr);
  EXPECT_NE(find_call(u, "get"), nullptr);
  ASSERT_EQ(u.defs.size(), 1u);
  EXPECT_TRUE(u.defs[0].is_async);
}

TEST(ParseUnit, SyntaxErrorThrowsForScripts) {
  EXPECT_THROW(parse_code("def broken(:\n    pass\n"), SyntaxError);
  EXPECT_THROW(parse_code("x = (1,\n"), SyntaxError);
}

TEST(ParseUnit, NotebookFallsBackPerCell) {
  const auto unit = notebook_from_json(
      "nb.ipynb", notebook({{"from sklearn.svm import SVC\n"}, {"def oops(:\n"}, {"clf = SVC()\n"}}));
  const auto u = parse_unit(unit);
  EXPECT_TRUE(u.partial);
  EXPECT_FALSE(u.warnings.empty());
  const auto* c = find_call(u, "SVC");
  ASSERT_NE(c, nullptr);
  EXPECT_EQ(c->location.line, 3);
  EXPECT_EQ(c->location.cell, 2);
}

TEST(ParseUnit, NotebookWithNoParseableCellThrows) {
  const auto unit = notebook_from_json("nb.ipynb", notebook({{"def a(:\n"}, {"(((\n"}}));
  EXPECT_THROW(parse_unit(unit), SyntaxError);
}

TEST(ParseUnit, IdentifiersContainDefsAndImports) {
  const auto u = parse_code("from sklearn.svm import SVC\ndef train(model=None):\n    return model\n");
  EXPECT_TRUE(u.identifiers.count("SVC"));
  EXPECT_TRUE(u.identifiers.count("train"));
  EXPECT_TRUE(u.identifiers.count("model"));
}

TEST(UnitImportsLibrary, ComponentMatch) {
  EXPECT_TRUE(unit_imports_library(parse_code("import sklearn.svm\n"), "sklearn"));
  EXPECT_TRUE(unit_imports_library(parse_code("from sklearn.svm import SVC\n"), "sklearn"));
  EXPECT_FALSE(unit_imports_library(parse_code("x = 1\n"), "sklearn"));
  EXPECT_FALSE(unit_imports_library(parse_code("import sklearnex.patch\n"), "sklearn"));
  EXPECT_TRUE(unit_imports_library(parse_code("import sklearnex.patch\n"), "sklearn", ImportMatch::substring));
  EXPECT_TRUE(unit_imports_library(parse_code("from mypkg.sklearn import x\n"), "sklearn"));
}

// Re-parsing each def's own source span yields the same parameters.
TEST(ParseUnit, PropertyDefSpanRoundTrip) {
  const std::string code = fixture::slurp(fixture::test_data("sigdiff/new/sklearn/svm/_classes.py")) +
                           "\n\ndef outer(a, b=[1, 2], *, c=lambda q: q + 1):\n    def inner(z=3):\n"
                           "        return z\n    return inner\n";
  const auto u = parse_code(code);
  const auto lines = text::split_lines(code);
  ASSERT_GE(u.defs.size(), 4u);
  for (const auto& d : u.defs) {
    std::string slice;
    const auto indent = text::indent_width(lines[d.span.first - 1]);
    for (int l = d.span.first; l <= d.span.last; ++l) {
      const auto line = lines[l - 1];
      slice += std::string(line.substr(std::min(indent, text::indent_width(line)))) + "\n";
    }
    const auto again = parse_code(slice);
    ASSERT_FALSE(again.defs.empty()) << d.function_name;
    EXPECT_EQ(again.defs[0].function_name, d.function_name);
    EXPECT_EQ(again.defs[0].params, d.params) << d.function_name;
  }
}

// No external call carries the name of a function or class defined in the unit.
TEST(ParseUnit, PropertyExternalCallClosure) {
  for (const char* f : {"dabc_example.py", "labeled/b_selection.py", "labeled/d_shadow.py", "cv_ten.py"}) {
    const auto u = parse_unit(load_unit(fixture::test_data(f)));
    std::set<std::string> local;
    for (const auto& d : u.defs) local.insert(d.function_name);
    for (const auto& c : u.classes) local.insert(c.name);
    for (const auto& c : u.calls) EXPECT_FALSE(local.count(c.callee_name)) << f << ": " << c.callee_name;
  }
}

// Code lines of a notebook equal the summed cell ranges, for random notebooks.
TEST(LoadUnit, PropertyNotebookLineAccounting) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> pool = {"x = 1\n", "%time f()\n", "!ls\n", "\n", "print(x)\n", "# note\n", "y = [\n",
                                         "  2]\n"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<std::string>> cells(1 + rng() % 5);
    for (auto& c : cells) {
      const auto n = rng() % 6;
      for (std::size_t i = 0; i < n; ++i) c.push_back(pool[rng() % pool.size()]);
    }
    const auto u = notebook_from_json("nb.ipynb", notebook(cells));
    int covered = 0;
    int prev_last = 0;
    for (const auto& span : u.cell_map) {
      EXPECT_EQ(span.first_line, prev_last + 1);
      covered += span.last_line - span.first_line + 1;
      prev_last = span.last_line;
    }
    EXPECT_EQ(covered, u.line_count());
  }
}

TEST(Lexer, KeywordsAndTokens) {
  EXPECT_TRUE(is_keyword("lambda"));
  EXPECT_FALSE(is_keyword("match"));
  const auto toks = tokenize("if x:\n    y = 'a' \\\n        + \"b\"\n");
  ASSERT_FALSE(toks.empty());
  EXPECT_TRUE(toks[0].is_name("if"));
  const auto indents = std::count_if(toks.begin(), toks.end(), [](const Token& t) { return t.kind == TokenKind::indent; });
  EXPECT_EQ(indents, 1);
  EXPECT_THROW(tokenize("s = 'unterminated\n"), SyntaxError);
}
