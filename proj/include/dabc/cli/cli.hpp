#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dabc::cli {

// Exit codes: 0 success, 1 fatal (nothing written), 2 partial failures.
constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kPartial = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace dabc::cli
