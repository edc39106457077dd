#include "dabc/util/fs.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dabc/util/error.hpp"

namespace dabc::fsutil {

namespace fs = std::filesystem;

std::vector<fs::path> list_files(const fs::path& root, const std::vector<std::string>& exts) {
  std::vector<fs::path> files;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw InputError(root, "cannot list directory: " + ec.message());
  for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) throw InputError(root, "cannot list directory: " + ec.message());
    std::error_code fec;
    if (!it->is_regular_file(fec)) continue;
    const auto ext = it->path().extension().string();
    if (std::find(exts.begin(), exts.end(), ext) != exts.end()) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
  return files;
}

std::string relative_generic(const fs::path& p, const fs::path& root) {
  return p.lexically_relative(root).generic_string();
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError(p, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, std::string_view content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(p, "cannot write file");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError(p, "write failed");
  }
  fs::rename(tmp, p);
}

}  // namespace dabc::fsutil
