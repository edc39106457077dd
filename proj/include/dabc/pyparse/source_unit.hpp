#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dabc::pyparse {

enum class UnitKind { script, notebook };

// One code cell's slice of the concatenated notebook text, 1-based inclusive.
struct CellSpan {
  int cell_index = 0;  // index into the notebook's `cells` array
  int first_line = 0;
  int last_line = 0;
};

struct SourceUnit {
  std::filesystem::path path;
  UnitKind kind = UnitKind::script;
  std::string code;
  std::vector<CellSpan> cell_map;

  std::optional<int> cell_of_line(int line) const;
  int line_count() const;
};

// Reads a .py or .ipynb file. Throws dabc::InputError on failure.
SourceUnit load_unit(const std::filesystem::path& path);

// Builds a notebook unit from nbformat-4 JSON text.
SourceUnit notebook_from_json(const std::filesystem::path& path, std::string_view json_text);

// True for lines the notebook loader drops (IPython magics and shell escapes).
bool is_magic_line(std::string_view line);

}  // namespace dabc::pyparse
