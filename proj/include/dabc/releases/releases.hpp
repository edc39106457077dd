#pragma once

#include <compare>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "dabc/miner/miner.hpp"

namespace dabc::releases {

struct VersionId {
  std::string raw;
  int major = 0;
  int minor = 0;
  std::optional<int> patch;

  // absent patch orders before .0
  std::tuple<int, int, int> key() const { return {major, minor, patch.value_or(-1)}; }
  std::strong_ordering operator<=>(const VersionId& o) const { return key() <=> o.key(); }
  bool operator==(const VersionId& o) const { return key() == o.key(); }
  std::string canonical() const;
};

// digits.digits[.digits] after an optional leading "v". Throws dabc::Error.
VersionId parse_version(std::string_view raw);

enum class Scheme { suffix_minor, semver_loose, numpy_style };
enum class ReleaseKind { major, minor, patch };

std::string_view to_string(Scheme s);
std::string_view to_string(ReleaseKind k);

struct ReleasePolicy {
  std::string library;
  Scheme scheme = Scheme::semver_loose;
};

// sklearn, pandas, numpy, semver
std::optional<ReleasePolicy> policy_for(std::string_view name);

ReleaseKind classify_release(const VersionId& v, const ReleasePolicy& policy);

struct ReleaseTag {
  VersionId version;
  std::string date;  // ISO-8601 YYYY-MM-DD
  ReleaseKind kind = ReleaseKind::minor;
};

// CSV with header `version,date`. Throws dabc::InputError naming the line.
std::vector<ReleaseTag> parse_tag_manifest(std::string_view text, const ReleasePolicy& policy, const std::string& origin);
std::vector<ReleaseTag> read_tag_manifest(const std::filesystem::path& path, const ReleasePolicy& policy);

std::optional<ReleaseTag> assign_dabc_release(const miner::DabcRecord& record, const std::vector<ReleaseTag>& tags,
                                              const ReleasePolicy& policy);

}  // namespace dabc::releases
