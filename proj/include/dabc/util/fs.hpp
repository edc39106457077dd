#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dabc::fsutil {

// Regular files under root whose extension is one of `exts`, sorted by their
// generic path. Symlinked directories are not followed.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& root,
                                              const std::vector<std::string>& exts);

// Generic (forward-slash) path of p relative to root.
std::string relative_generic(const std::filesystem::path& p, const std::filesystem::path& root);

std::string read_text(const std::filesystem::path& p);

// Writes via a temp file + rename so readers never see a half-written file.
void write_text(const std::filesystem::path& p, std::string_view content);

}  // namespace dabc::fsutil
