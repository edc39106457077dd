#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dabc/pyparse/source_unit.hpp"

namespace dabc::pyparse {

struct ImportedName {
  std::string name;
  std::optional<std::string> alias;
};

// `import a.b as c` gives module_path "a.b", alias "c".
// `from ..x import y` gives module_path "..x", imported_names {y}.
struct ImportRecord {
  std::string module_path;
  std::optional<std::string> alias;
  std::vector<ImportedName> imported_names;
  bool star = false;
  int line = 0;

  bool is_from() const { return !imported_names.empty() || star; }
};

enum class ParamKind { positional_only, positional_or_keyword, keyword_only, vararg, kwvararg };

std::string_view to_string(ParamKind kind);
std::optional<ParamKind> param_kind_from_string(std::string_view s);

struct ParamSpec {
  std::string name;
  std::optional<std::string> default_expr;
  ParamKind kind = ParamKind::positional_or_keyword;

  bool operator==(const ParamSpec&) const = default;
};

struct LineRange {
  int first = 0;
  int last = 0;
};

struct FunctionDef {
  std::string function_name;
  std::optional<std::string> class_name;
  std::vector<ParamSpec> params;
  std::optional<std::string> docstring;
  std::optional<LineRange> docstring_lines;
  LineRange span;
  std::vector<std::string> decorators;  // terminal names, e.g. "staticmethod"
  bool is_async = false;

  bool has_decorator(std::string_view name) const;
  const ParamSpec* find_param(std::string_view name) const;
};

struct ClassDef {
  std::string name;
  std::vector<std::string> bases;
  std::optional<std::string> docstring;
  std::optional<LineRange> docstring_lines;
  LineRange span;
};

struct Location {
  std::string path;
  int line = 0;
  int column = 0;
  std::optional<int> cell;
};

struct CallSite {
  std::string callee_name;
  std::optional<std::string> receiver_text;
  std::vector<std::string> positional_args;
  std::vector<std::pair<std::string, std::string>> keyword_args;  // source order, unique keys
  bool has_star_args = false;
  bool has_star_kwargs = false;
  // Number of plain positionals written before the first `*expr`.
  std::optional<std::size_t> star_args_position;
  Location location;

  const std::string* keyword(std::string_view name) const;
};

struct ParsedUnit {
  SourceUnit unit;
  std::vector<ImportRecord> imports;
  std::vector<FunctionDef> defs;
  std::vector<ClassDef> classes;
  std::vector<CallSite> calls;           // external calls only
  std::vector<CallSite> internal_calls;  // calls to local functions/classes
  std::set<std::string> identifiers;
  int decision_points = 0;
  bool partial = false;  // notebook parsed cell by cell after a whole-unit failure
  std::vector<std::string> warnings;
};

// Parses a unit. Scripts with syntax errors throw dabc::SyntaxError; notebooks
// fall back to per-cell parsing and only throw when no cell parses.
ParsedUnit parse_unit(const SourceUnit& unit);

// Convenience for tests and library scanning.
ParsedUnit parse_code(std::string_view code, std::string path = "<string>");

enum class ImportMatch { component, substring };

bool unit_imports_library(const ParsedUnit& parsed, std::string_view library_token,
                          ImportMatch mode = ImportMatch::component);

}  // namespace dabc::pyparse
