#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dabc::miner {

struct FunctionRef {
  std::optional<std::string> class_name;
  std::string function_name;

  bool operator==(const FunctionRef&) const = default;
};

// How a hit got its enclosing function.
enum class Attribution {
  none,               // not inside any def/class docstring
  function_docstring,
  class_constructor,  // class docstring; param in the class's __init__, or no __init__ in the file
  class_unverified,   // class docstring; the file's __init__ lacks the param
};

struct DirectiveHit {
  std::string path;  // relative to the scanned root
  int line = 0;
  std::string version;
  std::string description;
  std::optional<FunctionRef> enclosing_function;
  std::optional<std::string> enclosing_param;
  Attribution attribution = Attribution::none;
};

struct ScanResult {
  std::vector<DirectiveHit> hits;
  std::vector<std::string> warnings;
  std::size_t files_scanned = 0;
  std::size_t files_unparsed = 0;
};

// True iff the line contains `.. versionchanged:: ` followed by something.
bool is_directive_line(std::string_view line);

// Scans one file's text. `rel_path` is recorded verbatim in the hits.
// A Python syntax error still yields hits, without attribution, and appends a warning.
std::vector<DirectiveHit> scan_source(std::string_view rel_path, std::string_view code,
                                      std::vector<std::string>* warnings = nullptr);

ScanResult scan_directives(const std::filesystem::path& root, std::size_t jobs = 1);

enum class ChangeKind { default_value_change, type_change, other, needs_review };

std::string_view to_string(ChangeKind k);
std::optional<ChangeKind> change_kind_from_string(std::string_view s);

struct Classification {
  ChangeKind kind = ChangeKind::needs_review;
  std::optional<std::string> old_default;
  std::optional<std::string> new_default;
};

Classification classify_change(std::string_view description, bool has_param);

enum class Reason { NewFeature, ApiCompatibility, Maintainability, BugFixing };
enum class Effect { Aesthetics, Behavior, Performance, Refactoring };

std::string_view to_string(Reason r);
std::string_view to_string(Effect e);
std::optional<Reason> reason_from_string(std::string_view s);
std::optional<Effect> effect_from_string(std::string_view s);

struct DabcRecord {
  std::string dabc_msg;
  std::string version;
  std::string path;
  std::optional<std::string> class_name;
  std::optional<std::string> function_name;
  std::optional<std::string> argument;
  std::string dabc_url;
  int line = 0;  // recovered from dabc_url
  ChangeKind change_kind = ChangeKind::needs_review;
  std::optional<std::string> old_default;
  std::optional<std::string> new_default;
  std::optional<Reason> reason;
  std::optional<Effect> effect;

  // "Class.function(argument)" or "function(argument)".
  std::string fqn_text() const;
};

DabcRecord build_record(const DirectiveHit& hit, const Classification& cls, std::string_view url_base);

// Splits `<base>/<path>#L<line>` back into (path, line).
std::optional<std::pair<std::string, int>> parse_dabc_url(std::string_view url, std::string_view url_base);

std::vector<std::int64_t> extract_issue_refs(std::string_view commit_message);

// JSON Lines DB. read_db throws dabc::InputError naming the offending line.
std::string record_to_json_line(const DabcRecord& r);
std::string write_db(const std::vector<DabcRecord>& records);
std::vector<DabcRecord> read_db(const std::filesystem::path& path);
std::vector<DabcRecord> parse_db(std::string_view text, const std::string& origin);

}  // namespace dabc::miner
