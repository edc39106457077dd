#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dabc/releases/releases.hpp"
#include "dabc/util/error.hpp"
#include "support.hpp"

using namespace dabc;
using namespace dabc::releases;

namespace {

ReleasePolicy policy(std::string_view name) { return *policy_for(name); }

miner::DabcRecord rec(std::string version) {
  miner::DabcRecord r;
  r.version = std::move(version);
  return r;
}

}  // namespace

TEST(ParseVersion, Examples) {
  auto v = parse_version("0.22");
  EXPECT_EQ(v.major, 0);
  EXPECT_EQ(v.minor, 22);
  EXPECT_FALSE(v.patch);
  v = parse_version("1.16.3");
  EXPECT_EQ(v.key(), std::make_tuple(1, 16, 3));
  v = parse_version("v2.0.0");
  EXPECT_EQ(v.key(), std::make_tuple(2, 0, 0));
  EXPECT_EQ(v.raw, "v2.0.0");
  EXPECT_EQ(v.canonical(), "2.0.0");
  EXPECT_EQ(parse_version(" 1.2 ").key(), parse_version("1.2").key());
}

TEST(ParseVersion, Malformed) {
  for (const char* bad : {"", "1", "1.", ".1", "1.2.3.4", "1.x", "vv1.2", "1.2rc1", "1.-2", "1 .2"}) {
    try {
      parse_version(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_NE(std::string(e.what()).find("'" + std::string(bad) + "'"), std::string::npos);
    }
  }
}

TEST(ClassifyRelease, Examples) {
  EXPECT_EQ(classify_release(parse_version("0.22"), policy("sklearn")), ReleaseKind::major);
  EXPECT_EQ(classify_release(parse_version("0.19.1"), policy("sklearn")), ReleaseKind::minor);
  EXPECT_EQ(classify_release(parse_version("1.16.3"), policy("numpy")), ReleaseKind::patch);
  EXPECT_EQ(classify_release(parse_version("1.0.0"), policy("pandas")), ReleaseKind::major);
  EXPECT_EQ(classify_release(parse_version("0.25.0"), policy("pandas")), ReleaseKind::minor);
  EXPECT_EQ(classify_release(parse_version("1.4.0"), policy("pandas")), ReleaseKind::minor);
  EXPECT_EQ(classify_release(parse_version("2.0"), policy("semver")), ReleaseKind::major);
  EXPECT_EQ(classify_release(parse_version("1.24"), policy("numpy")), ReleaseKind::minor);
  EXPECT_FALSE(policy_for("cargo"));
  EXPECT_EQ(to_string(policy("sklearn").scheme), "suffix_minor");
}

TEST(ClassifyRelease, PropertyTotalAndSuffixMinorNeverMajorForTriples) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 2000; ++i) {
    std::string raw = std::to_string(rng() % 4) + "." + std::to_string(rng() % 30);
    const bool triple = rng() % 2;
    if (triple) raw += "." + std::to_string(rng() % 5);
    const auto v = parse_version(raw);
    for (const char* p : {"sklearn", "pandas", "numpy", "semver"}) {
      const auto k = classify_release(v, policy(p));
      EXPECT_EQ(k, classify_release(parse_version(raw), policy(p)));
      if (std::string_view(p) == "sklearn" && triple) {
        EXPECT_NE(k, ReleaseKind::major) << raw;
      }
    }
  }
}

TEST(VersionId, PropertyTotalOrder) {
  std::mt19937_64 rng(42);
  std::vector<VersionId> vs;
  for (int i = 0; i < 300; ++i) {
    std::string raw = std::to_string(rng() % 3) + "." + std::to_string(rng() % 4);
    if (rng() % 2) raw += "." + std::to_string(rng() % 3);
    vs.push_back(parse_version(raw));
  }
  std::sort(vs.begin(), vs.end());
  for (std::size_t i = 1; i < vs.size(); ++i) EXPECT_LE(vs[i - 1].key(), vs[i].key());
  EXPECT_LT(parse_version("0.20"), parse_version("0.20.0"));
  EXPECT_LT(parse_version("0.9.9"), parse_version("0.10"));
  EXPECT_EQ(parse_version("v1.2"), parse_version("1.2"));
}

TEST(TagManifest, ParsesAndClassifies) {
  const auto tags = read_tag_manifest(fixture::test_data("tags/sklearn.csv"), policy("sklearn"));
  ASSERT_EQ(tags.size(), 12u);
  EXPECT_EQ(tags[0].kind, ReleaseKind::major);
  EXPECT_EQ(tags[1].kind, ReleaseKind::minor);
}

TEST(TagManifest, ErrorsNameTheLine) {
  auto expect_err = [](std::string_view text, std::string_view needle) {
    try {
      parse_tag_manifest(text, *policy_for("pandas"), "tags.csv");
      ADD_FAILURE() << "accepted: " << text;
    } catch (const InputError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_err("raw_version,when\n1.0.0,2020-01-01\n", "line 1");
  expect_err("version,date\n1.0.0,2020-01-01\nbogus,2020-01-01\n", "line 3");
  expect_err("version,date\n1.0.0,2019-02-30\n", "line 2");
  expect_err("version,date\n1.0.0,2019/02/03\n", "line 2");
  expect_err("version,date\n1.0.0\n", "line 2");
  EXPECT_EQ(parse_tag_manifest("version,date\n\n1.0.0,2020-01-29\n", *policy_for("pandas"), "t").size(), 1u);
}

TEST(AssignRelease, Examples) {
  const auto sk = read_tag_manifest(fixture::test_data("tags/sklearn.csv"), policy("sklearn"));
  auto t = assign_dabc_release(rec("0.22"), sk, policy("sklearn"));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->version.raw, "0.22");
  EXPECT_EQ(t->kind, ReleaseKind::major);
  EXPECT_EQ(t->date, "2019-12-02");
  EXPECT_FALSE(assign_dabc_release(rec("0.99"), sk, policy("sklearn")));
  EXPECT_FALSE(assign_dabc_release(rec("not-a-version"), sk, policy("sklearn")));

  const auto pd = read_tag_manifest(fixture::test_data("tags/pandas.csv"), policy("pandas"));
  t = assign_dabc_release(rec("1.4.0"), pd, policy("pandas"));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->version.raw, "1.4.0");
  EXPECT_EQ(t->kind, ReleaseKind::minor);
}

TEST(AssignRelease, SmallestAtLeastWithinPrefix) {
  const auto sk = read_tag_manifest(fixture::test_data("tags/sklearn.csv"), policy("sklearn"));
  // three-part record: smallest tag >= it with the same X.Y
  auto t = assign_dabc_release(rec("0.20.1"), sk, policy("sklearn"));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->version.raw, "0.20.4");
  // two-part record under suffix_minor needs the exact tag
  t = assign_dabc_release(rec("v0.20"), sk, policy("sklearn"));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->version.raw, "0.20");
  const auto pd = read_tag_manifest(fixture::test_data("tags/pandas.csv"), policy("pandas"));
  t = assign_dabc_release(rec("1.0"), pd, policy("pandas"));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->version.raw, "1.0.0");
  t = assign_dabc_release(rec("1.0.1"), pd, policy("pandas"));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->version.raw, "1.0.5");
  EXPECT_FALSE(assign_dabc_release(rec("1.1.1"), pd, policy("pandas")));
}
