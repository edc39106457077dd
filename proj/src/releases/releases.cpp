#include "dabc/releases/releases.hpp"

#include <charconv>
#include <chrono>

#include "dabc/util/csv.hpp"
#include "dabc/util/error.hpp"
#include "dabc/util/fs.hpp"
#include "dabc/util/text.hpp"

namespace dabc::releases {

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

bool valid_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  int y = 0, m = 0, d = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) || !parse_int(s.substr(8, 2), d)) return false;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  return ymd.ok();
}

}  // namespace

std::string VersionId::canonical() const {
  std::string s = std::to_string(major) + "." + std::to_string(minor);
  if (patch) s += "." + std::to_string(*patch);
  return s;
}

VersionId parse_version(std::string_view raw) {
  VersionId v;
  v.raw = std::string(raw);
  std::string_view s = text::trim(raw);
  if (!s.empty() && (s[0] == 'v' || s[0] == 'V')) s.remove_prefix(1);
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = s.find('.', start);
    parts.push_back(s.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  int z = 0;
  if ((parts.size() != 2 && parts.size() != 3) || !parse_int(parts[0], v.major) || !parse_int(parts[1], v.minor) ||
      (parts.size() == 3 && !parse_int(parts[2], z)))
    throw Error("malformed version '" + std::string(raw) + "'");
  if (parts.size() == 3) v.patch = z;
  return v;
}

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::suffix_minor:
      return "suffix_minor";
    case Scheme::semver_loose:
      return "semver_loose";
    case Scheme::numpy_style:
      return "numpy_style";
  }
  return "semver_loose";
}

std::string_view to_string(ReleaseKind k) {
  switch (k) {
    case ReleaseKind::major:
      return "major";
    case ReleaseKind::minor:
      return "minor";
    case ReleaseKind::patch:
      return "patch";
  }
  return "minor";
}

std::optional<ReleasePolicy> policy_for(std::string_view name) {
  if (name == "sklearn") return ReleasePolicy{"sklearn", Scheme::suffix_minor};
  if (name == "pandas") return ReleasePolicy{"pandas", Scheme::semver_loose};
  if (name == "numpy") return ReleasePolicy{"numpy", Scheme::numpy_style};
  if (name == "semver") return ReleasePolicy{"semver", Scheme::semver_loose};
  return std::nullopt;
}

ReleaseKind classify_release(const VersionId& v, const ReleasePolicy& policy) {
  if (policy.scheme == Scheme::suffix_minor) return v.patch ? ReleaseKind::minor : ReleaseKind::major;
  const bool z_zero = !v.patch || *v.patch == 0;
  if (z_zero && v.minor == 0) return ReleaseKind::major;
  if (z_zero) return ReleaseKind::minor;
  return ReleaseKind::patch;
}

std::vector<ReleaseTag> parse_tag_manifest(std::string_view text_in, const ReleasePolicy& policy,
                                           const std::string& origin) {
  std::vector<csv::Row> rows;
  try {
    rows = csv::parse(text_in);
  } catch (const Error& e) {
    throw InputError(origin, e.what());
  }
  if (rows.empty() || rows[0].size() != 2 || text::trim(rows[0][0]) != "version" || text::trim(rows[0][1]) != "date")
    throw InputError(origin, "line 1: expected header 'version,date'");
  std::vector<ReleaseTag> tags;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() == 1 && text::is_blank(row[0])) continue;
    const std::string where = "line " + std::to_string(i + 1) + ": ";
    if (row.size() != 2) throw InputError(origin, where + "expected 2 fields");
    ReleaseTag t;
    try {
      t.version = parse_version(text::trim(row[0]));
    } catch (const Error& e) {
      throw InputError(origin, where + e.what());
    }
    t.date = std::string(text::trim(row[1]));
    if (!valid_iso_date(t.date)) throw InputError(origin, where + "bad date '" + t.date + "'");
    t.kind = classify_release(t.version, policy);
    tags.push_back(std::move(t));
  }
  return tags;
}

std::vector<ReleaseTag> read_tag_manifest(const std::filesystem::path& path, const ReleasePolicy& policy) {
  return parse_tag_manifest(fsutil::read_text(path), policy, path.generic_string());
}

std::optional<ReleaseTag> assign_dabc_release(const miner::DabcRecord& record, const std::vector<ReleaseTag>& tags,
                                              const ReleasePolicy& policy) {
  VersionId rv;
  try {
    rv = parse_version(record.version);
  } catch (const Error&) {
    return std::nullopt;
  }
  const bool exact = policy.scheme == Scheme::suffix_minor && !rv.patch;
  const ReleaseTag* best = nullptr;
  for (const auto& t : tags) {
    if (t.version.major != rv.major || t.version.minor != rv.minor) continue;
    if (exact ? !(t.version == rv) : t.version < rv) continue;
    if (!best || t.version < best->version) best = &t;
  }
  if (!best) return std::nullopt;
  return *best;
}

}  // namespace dabc::releases
