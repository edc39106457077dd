#include <algorithm>
#include <regex>

#include "dabc/miner/miner.hpp"
#include "dabc/pyparse/parsed_unit.hpp"
#include "dabc/util/error.hpp"
#include "dabc/util/fs.hpp"
#include "dabc/util/parallel.hpp"
#include "dabc/util/text.hpp"

namespace dabc::miner {

namespace {

constexpr std::string_view kDirective = ".. versionchanged:: ";

std::size_t directive_pos(std::string_view line) {
  std::size_t from = 0;
  while (true) {
    const auto p = line.find(kDirective, from);
    if (p == std::string_view::npos) return p;
    if (p + kDirective.size() < line.size()) return p;
    from = p + 1;
  }
}

bool is_underline(std::string_view line) {
  const auto t = text::trim(line);
  return t.size() >= 3 && t.find_first_not_of('-') == std::string_view::npos;
}

// `name : type`, `name`, `x1, x2 : type`, `*args`, `**kwargs : dict`
const std::regex& param_header_re() {
  static const std::regex re(R"(^\s*\**([A-Za-z_]\w*)\s*(?:,\s*\**[A-Za-z_]\w*\s*)*(?::.*)?$)");
  return re;
}

// Nearest numpydoc parameter header above the directive, if the directive sits
// inside a Parameters section of the docstring starting at doc_first.
std::optional<std::string> find_param(const std::vector<std::string_view>& lines, int doc_first, int directive_line) {
  const std::size_t dir_indent = text::indent_width(lines[directive_line - 1]);
  int section_title = 0;
  for (int l = directive_line - 1; l > doc_first; --l) {
    if (is_underline(lines[l - 1]) && !text::is_blank(lines[l - 2])) {
      section_title = l - 1;
      break;
    }
  }
  if (section_title == 0) return std::nullopt;
  auto title = text::trim(lines[section_title - 1]);
  if (title != "Parameters" && title != "Other Parameters") return std::nullopt;
  // headers sit at the indentation of the first entry below the underline
  std::optional<std::size_t> header_indent;
  for (int l = section_title + 2; l < directive_line; ++l) {
    if (!text::is_blank(lines[l - 1])) {
      header_indent = text::indent_width(lines[l - 1]);
      break;
    }
  }
  if (!header_indent || *header_indent >= dir_indent) return std::nullopt;
  for (int l = directive_line - 1; l > section_title + 1; --l) {
    auto line = lines[l - 1];
    if (text::is_blank(line) || text::indent_width(line) != *header_indent) continue;
    // a header wrapped with a trailing backslash starts on an earlier line
    while (l - 1 > section_title + 1 && !text::trim(lines[l - 2]).empty() && text::trim(lines[l - 2]).back() == '\\')
      --l;
    line = lines[l - 1];
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_match(line.begin(), line.end(), m, param_header_re())) return m[1].str();
    return std::nullopt;
  }
  return std::nullopt;
}

std::string strip_closing_quotes(std::string s) {
  for (std::string_view q : {"\"\"\"", "'''"}) {
    if (s.size() >= 3 && std::string_view(s).substr(s.size() - 3) == q) {
      s.resize(s.size() - 3);
      s = std::string(text::trim(s));
    }
  }
  return s;
}

// Body of the directive at 0-based index i.
std::string collect_description(const std::vector<std::string_view>& lines, std::size_t i, std::string_view same_line) {
  const std::size_t ind = text::indent_width(lines[i]);
  std::vector<std::string> parts;
  if (!same_line.empty()) parts.emplace_back(same_line);
  std::vector<std::string> body;
  int blanks = 0;
  for (std::size_t j = i + 1; j < lines.size(); ++j) {
    const auto line = lines[j];
    if (text::is_blank(line)) {
      if (++blanks >= 2) break;
      continue;
    }
    if (text::indent_width(line) <= ind) break;
    blanks = 0;
    body.emplace_back(text::trim(line));
  }
  // Flattened layout: the body sits at the directive's own indentation.
  if (body.empty() && same_line.empty()) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto line = lines[j];
      if (text::is_blank(line) || text::indent_width(line) != ind) break;
      const auto t = text::trim(line);
      if (t.substr(0, 3) == ".. ") break;
      body.emplace_back(t);
    }
  }
  for (auto& b : body) parts.push_back(std::move(b));
  return strip_closing_quotes(text::join(parts, " "));
}

struct DocOwner {
  pyparse::LineRange lines;
  std::optional<std::string> class_name;
  std::string function_name;
  bool is_class = false;
};

}  // namespace

bool is_directive_line(std::string_view line) { return directive_pos(line) != std::string_view::npos; }

std::vector<DirectiveHit> scan_source(std::string_view rel_path, std::string_view code,
                                      std::vector<std::string>* warnings) {
  const auto lines = text::split_lines(code);
  std::vector<std::size_t> directive_idx;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_directive_line(lines[i])) directive_idx.push_back(i);
  }
  if (directive_idx.empty()) return {};

  std::optional<pyparse::ParsedUnit> parsed;
  try {
    parsed = pyparse::parse_code(code, std::string(rel_path));
  } catch (const SyntaxError& e) {
    if (warnings) warnings->push_back(std::string(rel_path) + ": " + e.what());
  }

  std::vector<DocOwner> owners;
  if (parsed) {
    for (const auto& d : parsed->defs) {
      if (d.docstring_lines) owners.push_back({*d.docstring_lines, d.class_name, d.function_name, false});
    }
    for (const auto& c : parsed->classes) {
      if (c.docstring_lines) owners.push_back({*c.docstring_lines, c.name, "__init__", true});
    }
  }

  std::vector<DirectiveHit> hits;
  for (const std::size_t i : directive_idx) {
    const auto line = lines[i];
    const auto rest = text::trim(line.substr(directive_pos(line) + kDirective.size()));
    DirectiveHit hit;
    hit.path = std::string(rel_path);
    hit.line = static_cast<int>(i) + 1;
    const auto sp = rest.find_first_of(" \t");
    hit.version = std::string(rest.substr(0, sp));
    const auto same_line = sp == std::string_view::npos ? std::string_view{} : text::trim(rest.substr(sp));
    if (hit.version.empty()) hit.version = std::string(line.substr(directive_pos(line) + kDirective.size()));
    hit.description = collect_description(lines, i, same_line);

    for (const auto& o : owners) {
      if (hit.line < o.lines.first || hit.line > o.lines.last) continue;
      hit.enclosing_function = FunctionRef{o.class_name, o.function_name};
      hit.enclosing_param = find_param(lines, o.lines.first, hit.line);
      if (!o.is_class) {
        hit.attribution = Attribution::function_docstring;
        break;
      }
      // an __init__ defined elsewhere (inherited) cannot contradict the docstring
      const pyparse::FunctionDef* init = nullptr;
      for (const auto& d : parsed->defs) {
        if (d.class_name == o.class_name && d.function_name == "__init__") init = &d;
      }
      hit.attribution = !init || (hit.enclosing_param && init->find_param(*hit.enclosing_param))
                            ? Attribution::class_constructor
                            : Attribution::class_unverified;
      break;
    }
    hits.push_back(std::move(hit));
  }
  return hits;
}

ScanResult scan_directives(const std::filesystem::path& root, std::size_t jobs) {
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) throw InputError(root, "not a directory");
  const auto files = fsutil::list_files(root, {".py"});
  struct PerFile {
    std::vector<DirectiveHit> hits;
    std::vector<std::string> warnings;
    bool unparsed = false;
  };
  auto results = parallel_map<PerFile>(files.size(), jobs, [&](std::size_t i) {
    PerFile r;
    const auto rel = fsutil::relative_generic(files[i], root);
    std::string code;
    try {
      code = text::sanitize_utf8(fsutil::read_text(files[i]));
    } catch (const InputError& e) {
      r.warnings.push_back(e.what());
      r.unparsed = true;
      return r;
    }
    r.hits = scan_source(rel, code, &r.warnings);
    r.unparsed = !r.warnings.empty();
    return r;
  });
  ScanResult out;
  out.files_scanned = files.size();
  for (auto& r : results) {
    for (auto& h : r.hits) out.hits.push_back(std::move(h));
    for (auto& w : r.warnings) out.warnings.push_back(std::move(w));
    if (r.unparsed) ++out.files_unparsed;
  }
  return out;
}

}  // namespace dabc::miner
