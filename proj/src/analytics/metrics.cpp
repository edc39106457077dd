#include <set>

#include "dabc/analytics/analytics.hpp"
#include "dabc/util/text.hpp"

namespace dabc::analytics {

namespace {

const std::set<std::string_view>& builtins() {
  static const std::set<std::string_view> names = {
      "__import__", "abs",       "aiter",      "all",          "anext",     "any",        "ascii",    "bin",
      "bool",       "breakpoint", "bytearray", "bytes",        "callable",  "chr",        "classmethod",
      "compile",    "complex",   "delattr",    "dict",         "dir",       "divmod",     "enumerate", "eval",
      "exec",       "exit",      "filter",     "float",        "format",    "frozenset",  "getattr",  "globals",
      "hasattr",    "hash",      "help",       "hex",          "id",        "input",      "int",      "isinstance",
      "issubclass", "iter",      "len",        "list",         "locals",    "map",        "max",      "memoryview",
      "min",        "next",      "object",     "oct",          "open",      "ord",        "pow",      "print",
      "property",   "quit",      "range",      "repr",         "reversed",  "round",      "set",      "setattr",
      "slice",      "sorted",    "staticmethod", "str",        "sum",       "super",      "tuple",    "type",
      "vars",       "zip",
  };
  return names;
}

std::string_view receiver_head(std::string_view recv) {
  const auto p = recv.find_first_of(".([ ");
  return recv.substr(0, p);
}

}  // namespace

bool is_builtin_name(std::string_view name) {
  return builtins().count(name) > 0;
}

std::vector<std::string> imported_bindings(const pyparse::ParsedUnit& parsed) {
  std::set<std::string> names;
  for (const auto& imp : parsed.imports) {
    if (imp.is_from()) {
      for (const auto& n : imp.imported_names) names.insert(n.alias.value_or(n.name));
    } else if (imp.alias) {
      names.insert(*imp.alias);
    } else {
      names.insert(imp.module_path.substr(0, imp.module_path.find('.')));
    }
  }
  return {names.begin(), names.end()};
}

StructuralMetrics compute_metrics(const pyparse::ParsedUnit& parsed) {
  StructuralMetrics m;
  for (const auto line : text::split_lines(parsed.unit.code)) {
    const auto t = text::trim(line);
    if (t.empty()) {
      ++m.blank_loc;
    } else if (t.front() == '#') {
      ++m.comment_loc;
    } else {
      ++m.sloc;
    }
  }
  const auto bound_v = imported_bindings(parsed);
  const std::set<std::string> bound(bound_v.begin(), bound_v.end());
  std::set<std::string> api, builtin, user;
  for (const auto& c : parsed.calls) {
    const bool is_api = c.receiver_text ? bound.count(std::string(receiver_head(*c.receiver_text))) > 0
                                        : bound.count(c.callee_name) > 0;
    if (is_api) {
      ++m.api_calls_count;
      api.insert(c.receiver_text ? *c.receiver_text + "." + c.callee_name : c.callee_name);
    } else if (!c.receiver_text && is_builtin_name(c.callee_name)) {
      ++m.builtin_calls_count;
      builtin.insert(c.callee_name);
    } else {
      ++m.other_calls_count;
    }
  }
  for (const auto& c : parsed.internal_calls) {
    ++m.user_calls_count;
    user.insert(c.callee_name);
  }
  m.api_calls_unique = api.size();
  m.builtin_calls_unique = builtin.size();
  m.user_calls_unique = user.size();
  // no code, no paths
  m.cyclomatic = m.sloc == 0 ? 0 : 1 + static_cast<std::size_t>(parsed.decision_points);
  return m;
}

std::vector<std::pair<std::string, std::size_t>> metric_columns(const StructuralMetrics& m) {
  return {
      {"sloc", m.sloc},
      {"blank_loc", m.blank_loc},
      {"comment_loc", m.comment_loc},
      {"api_calls_count", m.api_calls_count},
      {"api_calls_unique", m.api_calls_unique},
      {"other_calls_count", m.other_calls_count},
      {"builtin_calls_count", m.builtin_calls_count},
      {"builtin_calls_unique", m.builtin_calls_unique},
      {"user_calls_count", m.user_calls_count},
      {"user_calls_unique", m.user_calls_unique},
      {"cyclomatic", m.cyclomatic},
  };
}

}  // namespace dabc::analytics
