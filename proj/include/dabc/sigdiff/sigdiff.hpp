#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dabc/miner/miner.hpp"
#include "dabc/pyparse/parsed_unit.hpp"

namespace dabc::sigdiff {

using pyparse::ParamSpec;

// "Class.function" or "function".
std::string fqn_key(const std::optional<std::string>& class_name, std::string_view function_name);

struct SignatureSnapshot {
  std::string source_label;
  std::map<std::string, std::vector<ParamSpec>> entries;
  std::set<std::string> static_methods;  // keys of @staticmethod defs (no receiver)
  std::map<std::string, std::string> origins;  // key -> file it came from; not serialized

  const std::vector<ParamSpec>* find(const std::optional<std::string>& class_name, std::string_view function) const;
};

// True for files under tests/ or test/, test_*.py and conftest.py.
bool is_test_path(std::string_view rel_path);

// Adds every def of a parsed file. On a key seen before, the later definition
// replaces the earlier one, except that test code never replaces non-test
// code. Either way the collision is noted in `warnings`.
void add_defs(SignatureSnapshot& snap, const std::vector<pyparse::FunctionDef>& defs, std::string_view rel_path,
              std::vector<std::string>& warnings);

struct SnapshotResult {
  SignatureSnapshot snapshot;
  std::vector<std::string> warnings;
  std::size_t files_failed = 0;
};

SnapshotResult snapshot(const std::filesystem::path& root, std::string label, std::size_t jobs = 1);

enum class DiffKind { value_changed, default_added, default_removed };
std::string_view to_string(DiffKind k);

struct DefaultDiff {
  std::optional<std::string> class_name;
  std::string function_name;
  std::string param;
  std::optional<std::string> old_default;
  std::optional<std::string> new_default;
  DiffKind kind = DiffKind::value_changed;

  bool operator==(const DefaultDiff&) const = default;
};

// Whitespace collapsed outside string literals and '...' literals rewritten as "...".
std::string normalize_default(std::string_view expr);

std::vector<DefaultDiff> diff_defaults(const SignatureSnapshot& old_snap, const SignatureSnapshot& new_snap);

struct Reconciliation {
  std::vector<std::pair<DefaultDiff, miner::DabcRecord>> documented;
  std::vector<DefaultDiff> undocumented;
  std::vector<miner::DabcRecord> doc_only;
};

Reconciliation reconcile(const std::vector<DefaultDiff>& diffs, const std::vector<miner::DabcRecord>& records);

std::string snapshot_to_json(const SignatureSnapshot& snap);
SignatureSnapshot snapshot_from_json(std::string_view json_text, const std::string& origin);
SignatureSnapshot read_snapshot(const std::filesystem::path& path);

std::string reconciliation_to_json(const Reconciliation& r, std::string_view old_label, std::string_view new_label);

}  // namespace dabc::sigdiff
