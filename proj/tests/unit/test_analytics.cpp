#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dabc/analytics/analytics.hpp"
#include "dabc/pyparse/parsed_unit.hpp"
#include "dabc/pyparse/source_unit.hpp"
#include "support.hpp"

using namespace dabc;
using namespace dabc::analytics;

namespace {

// independent oracle: quadratic average ranks, long double Pearson
long double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<long double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      long double less = 0, equal = 0;
      for (const double w : v) {
        less += w < v[i];
        equal += w == v[i];
      }
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  const auto a = ranks(x), b = ranks(y);
  const long double n = a.size();
  const long double ma = std::accumulate(a.begin(), a.end(), 0.0L) / n;
  const long double mb = std::accumulate(b.begin(), b.end(), 0.0L) / n;
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

const Table& table(const Report& r, std::string_view name) {
  for (const auto& t : r.tables) {
    if (t.name == name) return t;
  }
  throw std::runtime_error("no table " + std::string(name));
}

double sum_percent(const std::vector<std::string>& p) {
  double s = 0;
  for (const auto& v : p) s += std::stod(v);
  return s;
}

}  // namespace

TEST(Metrics, EmptyUnit) {
  const auto m = compute_metrics(pyparse::parse_code(""));
  for (const auto& [name, v] : metric_columns(m)) EXPECT_EQ(v, 0u) << name;
}

TEST(Metrics, DabcExample) {
  const auto parsed = pyparse::parse_unit(pyparse::load_unit(fixture::test_data("dabc_example.py")));
  const auto m = compute_metrics(parsed);
  EXPECT_EQ(m.sloc, 13u);
  EXPECT_EQ(m.comment_loc, 4u);
  EXPECT_EQ(m.blank_loc, 4u);
  EXPECT_EQ(m.builtin_calls_count, 1u);
  EXPECT_EQ(m.builtin_calls_unique, 1u);
  // datasets.fetch_..., train_test_split, SVC, accuracy_score
  EXPECT_EQ(m.api_calls_count, 4u);
  EXPECT_EQ(m.user_calls_count, 0u);
  EXPECT_EQ(m.cyclomatic, 1u);
}

TEST(Metrics, CyclomaticAndUserCalls) {
  const auto m = compute_metrics(pyparse::parse_code(
      "def f(x):\n"
      "    if x:\n"
      "        return 1\n"
      "    else:\n"
      "        return 2\n"
      "f(1)\n"
      "f(2)\n"));
  EXPECT_EQ(m.cyclomatic, 2u);
  EXPECT_EQ(m.user_calls_count, 2u);
  EXPECT_EQ(m.user_calls_unique, 1u);
}

TEST(Metrics, PropertyLineAccountingAndUniqueBounds) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pieces = {
      "import numpy as np\n", "x = np.zeros(3)\n", "\n", "# note\n", "print(len([1]))\n",
      "def g():\n    return 1\n", "g()\n", "for i in range(3):\n    pass\n", "y = x.sum()\n"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string code;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) code += pieces[rng() % pieces.size()];
    const auto parsed = pyparse::parse_code(code);
    const auto m = compute_metrics(parsed);
    std::size_t lines = 0;
    for (const char c : code) lines += c == '\n';
    EXPECT_EQ(m.sloc + m.blank_loc + m.comment_loc, lines) << code;
    EXPECT_LE(m.api_calls_unique, m.api_calls_count);
    EXPECT_LE(m.builtin_calls_unique, m.builtin_calls_count);
    EXPECT_LE(m.user_calls_unique, m.user_calls_count);
    EXPECT_EQ(m.api_calls_count + m.builtin_calls_count + m.other_calls_count, parsed.calls.size());
  }
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {1, 2, 3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_NEAR(spearman({1, 2, 2, 4}, {1, 2, 3, 4}), 0.9486832980505138, 1e-12);
  EXPECT_THROW(spearman({1, 1, 1}, {1, 2, 3}), CorrelationUndefined);
  EXPECT_THROW(spearman({1}, {2}), CorrelationUndefined);
  EXPECT_THROW(spearman({1, 2}, {1, 2, 3}), CorrelationUndefined);
}

TEST(Spearman, AverageRanks) {
  EXPECT_EQ(average_ranks({10, 20, 20, 40}), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_EQ(average_ranks({3, 3, 3}), (std::vector<double>{2, 2, 2}));
}

TEST(Spearman, PropertyOracleSymmetryRankInvariance) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng() % 5);
    for (auto& v : y) v = static_cast<double>(rng() % 5);
    double r;
    try {
      r = spearman(x, y);
    } catch (const CorrelationUndefined&) {
      continue;
    }
    ++checked;
    EXPECT_NEAR(r, static_cast<double>(oracle_spearman(x, y)), 1e-12);
    EXPECT_DOUBLE_EQ(r, spearman(y, x));
    std::vector<double> mx = x;
    for (auto& v : mx) v = std::exp(v) * 3 - 1;  // strictly increasing map
    EXPECT_NEAR(r, spearman(mx, y), 1e-12);
    EXPECT_GE(r, -1.0);
    EXPECT_LE(r, 1.0);
  }
  EXPECT_GT(checked, 2000);
}

TEST(PermPvalue, Examples) {
  std::vector<double> x(10), y(10);
  std::iota(x.begin(), x.end(), 0.0);
  std::iota(y.begin(), y.end(), 5.0);
  EXPECT_LE(perm_pvalue(x, y, 1000, 1), 0.01);
  EXPECT_DOUBLE_EQ(perm_pvalue({1, 2}, {3, 4}, 500, 1), 1.0);
  // multiplicative scramble, rho ~ 0.037
  std::vector<double> a(40), b(40);
  for (int i = 0; i < 40; ++i) {
    a[i] = i;
    b[i] = (i * 17) % 41;
  }
  EXPECT_NEAR(spearman(a, b), 0.03696060037523453, 1e-12);
  EXPECT_GT(perm_pvalue(a, b, 2000, 9), 0.5);
  EXPECT_EQ(perm_pvalue(a, b, 500, 42), perm_pvalue(a, b, 500, 42));
  const double p = perm_pvalue(a, b, 500, 42);
  EXPECT_GT(p, 0.0);
  EXPECT_LE(p, 1.0);
}

TEST(Bucket, Boundaries) {
  constexpr double eps = 1e-9;
  EXPECT_EQ(bucket(0.0), Level::negligible);
  EXPECT_EQ(bucket(0.30 - eps), Level::negligible);
  EXPECT_EQ(bucket(0.30), Level::low);
  EXPECT_EQ(bucket(0.50 - eps), Level::low);
  EXPECT_EQ(bucket(0.50), Level::moderate);
  EXPECT_EQ(bucket(0.70 - eps), Level::moderate);
  EXPECT_EQ(bucket(0.70), Level::high);
  EXPECT_EQ(bucket(0.90 - eps), Level::high);
  EXPECT_EQ(bucket(0.90), Level::very_high);
  EXPECT_EQ(bucket(-0.95), Level::very_high);
  EXPECT_EQ(bucket(-0.31), Level::low);
  EXPECT_EQ(to_string(Level::very_high), "very_high");
}

TEST(ClassifyModule, ShippedMappings) {
  const auto sk = read_mapping(fixture::shipped_data("sklearn/modules.json"));
  EXPECT_EQ(classify_module("sklearn/model_selection/_search.py", sk), "Model Evaluation");
  EXPECT_EQ(classify_module("sklearn/svm/_classes.py", sk) == "Others", false);
  EXPECT_EQ(classify_module("setup.py", sk), "Others");
  const auto pd = read_mapping(fixture::shipped_data("pandas/modules.json"));
  EXPECT_EQ(classify_module("pandas/core/frame.py", pd), "DataFrame");
  // longest prefix wins
  const ModuleMapping m = {{"a/", "A"}, {"a/b/", "B"}};
  EXPECT_EQ(classify_module("a/b/c.py", m), "B");
  EXPECT_EQ(classify_module("a/c.py", m), "A");
  EXPECT_THROW(parse_mapping("{}", "m"), InputError);
  EXPECT_THROW(parse_mapping(R"([{"prefix": 1, "module": "x"}])", "m"), InputError);
}

TEST(Percentages, PandasTopListReplay) {
  const std::vector<std::size_t> counts = {108647, 51631, 9367, 904, 673, 558, 297, 47, 28};
  const auto p = percentages(counts);
  const std::vector<std::string> expected = {"63.1", "30.0", "5.4", "0.5", "0.4", "0.3", "0.2", "0.0", "0.0"};
  EXPECT_EQ(p, expected);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}), 172152u);
}

TEST(Percentages, NumpyTopListReplay) {
  EXPECT_EQ(percentages({1270, 5}), (std::vector<std::string>{"99.6", "0.4"}));
}

TEST(Percentages, EdgeCases) {
  EXPECT_TRUE(percentages({}).empty());
  EXPECT_EQ(percentages({0, 0}), (std::vector<std::string>{"0.0", "0.0"}));
  EXPECT_EQ(percentages({1, 1, 1}), (std::vector<std::string>{"33.3", "33.3", "33.3"}));
  EXPECT_EQ(percentages({1, 7}), (std::vector<std::string>{"12.5", "87.5"}));
}

TEST(Percentages, PropertySumNearHundred) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<std::size_t> counts(1 + rng() % 40);
    for (auto& c : counts) c = rng() % 4 == 0 ? rng() % 3 : rng() % 100000;
    if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == 0) continue;
    const auto p = percentages(counts);
    EXPECT_NEAR(sum_percent(p), 100.0, 0.1 + 1e-9);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i)
      EXPECT_NEAR(std::stod(p[i]), 100.0 * counts[i] / total, 0.1 + 1e-9);
  }
}

TEST(Aggregate, EmptyInputs) {
  const auto rep = aggregate({});
  for (const auto& t : rep.tables) {
    if (t.name != "clients") {
      EXPECT_TRUE(t.rows.empty()) << t.name;
    }
  }
  const auto& c = table(rep, "clients");
  EXPECT_EQ(c.rows[0], (std::vector<std::string>{"clients_scanned", "n/a"}));
  EXPECT_EQ(c.rows[2], (std::vector<std::string>{"vulnerable_clients_percent", "n/a"}));
}

TEST(Aggregate, VersionsReleasesAndCalls) {
  ReportInput in;
  auto rec = [](std::string v, std::string path) {
    miner::DabcRecord r;
    r.version = std::move(v);
    r.path = std::move(path);
    return r;
  };
  in.records = {rec("0.22", "sklearn/svm/_classes.py"), rec("v0.22", "sklearn/model_selection/_search.py"),
                rec("1.1", "sklearn/metrics/_regression.py")};
  const auto policy = *releases::policy_for("sklearn");
  in.releases = ReleaseInfo{releases::read_tag_manifest(fixture::test_data("tags/sklearn.csv"), policy), policy};
  in.mapping = read_mapping(fixture::shipped_data("sklearn/modules.json"));
  in.calls = {{"SVC(gamma)", "a.py", matcher::Verdict::vulnerable},
              {"SVC(gamma)", "a.py", matcher::Verdict::vulnerable},
              {"SVC(gamma)", "b.py", matcher::Verdict::vulnerable},
              {"KFold(n_splits)", "b.py", matcher::Verdict::safe},
              {"KFold(n_splits)", "c.py", matcher::Verdict::indeterminate}};
  in.clients_scanned = 4;
  const auto rep = aggregate(in);

  const auto& v = table(rep, "versions");
  ASSERT_EQ(v.rows.size(), 2u);
  EXPECT_EQ(v.rows[0], (std::vector<std::string>{"0.22", "2", "66.7", "major", "2019-12-02"}));
  EXPECT_EQ(v.rows[1][0], "1.1");
  EXPECT_EQ(v.rows[1][1], "1");
  EXPECT_EQ(v.rows[1][3], "major");
  const auto& r = table(rep, "releases");
  EXPECT_EQ(r.rows[0][0], "major");
  EXPECT_EQ(r.rows[0][1], "3");
  const auto& calls = table(rep, "calls");
  ASSERT_EQ(calls.rows.size(), 1u);
  EXPECT_EQ(calls.rows[0], (std::vector<std::string>{"SVC(gamma)", "3", "100.0", "2"}));
  const auto& c = table(rep, "clients");
  EXPECT_EQ(c.rows[1][1], "2");
  EXPECT_EQ(c.rows[2][1], "50.0");
  EXPECT_EQ(c.rows[3][1], "3");
  EXPECT_EQ(c.rows[4][1], "1");
  EXPECT_EQ(c.rows[5][1], "1");
}

TEST(Aggregate, UnassignedVersionWarns) {
  ReportInput in;
  miner::DabcRecord r;
  r.version = "9.9";
  r.path = "x.py";
  in.records = {r};
  const auto policy = *releases::policy_for("sklearn");
  in.releases = ReleaseInfo{releases::read_tag_manifest(fixture::test_data("tags/sklearn.csv"), policy), policy};
  const auto rep = aggregate(in);
  EXPECT_EQ(table(rep, "releases").rows[0][0], "unassigned");
  EXPECT_EQ(rep.warnings.size(), 1u);
}

TEST(Render, Formats) {
  const auto t = count_table("modules", "module", "dabcs", {{"A", 3}, {"B", 1}, {"C", 3}});
  EXPECT_EQ(to_csv(t), "module,dabcs,percent\nA,3,42.9\nC,3,42.9\nB,1,14.3\n");
  EXPECT_EQ(to_markdown(t),
            "### modules\n\n| module | dabcs | percent |\n|---|---:|---:|\n| A | 3 | 42.9 |\n| C | 3 | 42.9 |\n"
            "| B | 1 | 14.3 |\n");
  const auto j = to_json({t});
  EXPECT_NE(j.find("\"dabcs\": 3"), std::string::npos);
  EXPECT_NE(j.find("\"percent\": \"42.9\""), std::string::npos);
}
