#include "dabc/pyparse/source_unit.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dabc/util/error.hpp"
#include "dabc/util/text.hpp"

namespace dabc::pyparse {

namespace fs = std::filesystem;

std::optional<int> SourceUnit::cell_of_line(int line) const {
  for (const auto& c : cell_map) {
    if (line >= c.first_line && line <= c.last_line) return c.cell_index;
  }
  return std::nullopt;
}

int SourceUnit::line_count() const { return static_cast<int>(text::split_lines(code).size()); }

bool is_magic_line(std::string_view line) {
  const auto t = text::trim_left(line);
  return !t.empty() && (t[0] == '%' || t[0] == '!' || t[0] == '?');
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError(path, "read error");
  return ss.str();
}

std::string strip_bom(std::string s) {
  if (s.size() >= 3 && s.compare(0, 3, "\xEF\xBB\xBF") == 0) s.erase(0, 3);
  return s;
}

}  // namespace

SourceUnit notebook_from_json(const fs::path& path, std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text::sanitize_utf8(json_text));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path, std::string("malformed notebook JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("cells") || !doc["cells"].is_array())
    throw InputError(path, "malformed notebook JSON: no top-level cells array");

  SourceUnit unit;
  unit.path = path;
  unit.kind = UnitKind::notebook;
  int next_line = 1;
  const auto& cells = doc["cells"];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    if (!cell.is_object()) throw InputError(path, "malformed notebook JSON: cell " + std::to_string(i) + " is not an object");
    if (cell.value("cell_type", "") != "code") continue;
    std::string source;
    if (cell.contains("source")) {
      const auto& src = cell["source"];
      if (src.is_string()) {
        source = src.get<std::string>();
      } else if (src.is_array()) {
        for (const auto& piece : src) {
          if (!piece.is_string()) throw InputError(path, "malformed notebook JSON: non-string source in cell " + std::to_string(i));
          source += piece.get<std::string>();
        }
      } else {
        throw InputError(path, "malformed notebook JSON: bad source in cell " + std::to_string(i));
      }
    }
    const int first = next_line;
    for (auto line : text::split_lines(source)) {
      if (is_magic_line(line)) continue;
      unit.code.append(line);
      unit.code.push_back('\n');
      ++next_line;
    }
    if (next_line > first) unit.cell_map.push_back({static_cast<int>(i), first, next_line - 1});
  }
  return unit;
}

SourceUnit load_unit(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext != ".py" && ext != ".ipynb") throw InputError(path, "unsupported extension '" + ext + "'");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw InputError(path, "not a regular file");
  auto raw = read_file(path);
  if (ext == ".ipynb") return notebook_from_json(path, raw);
  SourceUnit unit;
  unit.path = path;
  unit.kind = UnitKind::script;
  unit.code = strip_bom(text::sanitize_utf8(raw));
  return unit;
}

}  // namespace dabc::pyparse
