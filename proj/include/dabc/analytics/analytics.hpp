#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dabc/matcher/matcher.hpp"
#include "dabc/miner/miner.hpp"
#include "dabc/pyparse/parsed_unit.hpp"
#include "dabc/releases/releases.hpp"
#include "dabc/util/error.hpp"

namespace dabc::analytics {

struct StructuralMetrics {
  std::size_t sloc = 0;
  std::size_t blank_loc = 0;
  std::size_t comment_loc = 0;
  std::size_t api_calls_count = 0;
  std::size_t api_calls_unique = 0;
  std::size_t builtin_calls_count = 0;
  std::size_t builtin_calls_unique = 0;
  std::size_t user_calls_count = 0;
  std::size_t user_calls_unique = 0;
  std::size_t other_calls_count = 0;  // external, neither api nor builtin
  std::size_t cyclomatic = 0;
};

bool is_builtin_name(std::string_view name);

// Names bound by the unit's imports (`import a.b` binds a).
std::vector<std::string> imported_bindings(const pyparse::ParsedUnit& parsed);

StructuralMetrics compute_metrics(const pyparse::ParsedUnit& parsed);

// (column name, value) in a fixed order, shared by clients.csv and stats.
std::vector<std::pair<std::string, std::size_t>> metric_columns(const StructuralMetrics& m);

struct CorrelationUndefined : Error {
  using Error::Error;
};

enum class Level { negligible, low, moderate, high, very_high };
std::string_view to_string(Level l);

struct CorrelationResult {
  double coefficient = 0;
  Level level = Level::negligible;
  double p_value = 1;
  std::size_t n = 0;
};

std::vector<double> average_ranks(const std::vector<double>& v);

// Throws CorrelationUndefined on size mismatch, n < 2 or a constant vector.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Two-sided permutation test on the Spearman coefficient; deterministic in seed.
double perm_pvalue(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t iterations,
                   std::uint64_t seed);

Level bucket(double coefficient);

CorrelationResult correlate(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t iterations,
                            std::uint64_t seed);

using ModuleMapping = std::vector<std::pair<std::string, std::string>>;  // (prefix, module)

std::string classify_module(std::string_view record_path, const ModuleMapping& mapping);

// JSON array of {"prefix": ..., "module": ...}. Throws InputError.
ModuleMapping parse_mapping(std::string_view text, const std::string& origin);
ModuleMapping read_mapping(const std::filesystem::path& path);

// One decimal place per row, rounded half up; the sum stays within 100 +/- 0.1
// when total > 0.
std::vector<std::string> percentages(const std::vector<std::size_t>& counts);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct CallRow {
  std::string dabc_id;
  std::string client;  // unit path
  matcher::Verdict verdict = matcher::Verdict::vulnerable;
};

struct ReleaseInfo {
  std::vector<releases::ReleaseTag> tags;
  releases::ReleasePolicy policy;
};

struct ReportInput {
  std::vector<miner::DabcRecord> records;
  std::vector<CallRow> calls;
  std::optional<std::size_t> clients_scanned;
  std::optional<ReleaseInfo> releases;
  ModuleMapping mapping;
};

struct Report {
  std::vector<Table> tables;
  std::vector<std::string> warnings;
};

// Rows sorted by count descending, then by name.
Table count_table(std::string name, std::string key_column, std::string count_column,
                  const std::map<std::string, std::size_t>& counts);

Report aggregate(const ReportInput& in);

std::string to_csv(const Table& t);
std::string to_markdown(const Table& t);
std::string to_json(const std::vector<Table>& tables);

}  // namespace dabc::analytics
