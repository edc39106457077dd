#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dabc/miner/miner.hpp"
#include "dabc/pyparse/parsed_unit.hpp"
#include "dabc/sigdiff/sigdiff.hpp"

namespace dabc::matcher {

using pyparse::CallSite;
using pyparse::ParamKind;
using pyparse::ParamSpec;

struct DabcDefinition {
  miner::DabcRecord record;
  std::string dabc_id;  // unique within a definition list
  std::optional<std::string> class_name;
  std::string callable_name;
  std::vector<ParamSpec> params;  // receiver removed
  std::string changed_param;
  std::string provenance;  // label of the signature source
};

// Builds a definition from a record and the full library signature
// (including the receiver). Returns nullopt with `why` set when the record
// cannot enter the matcher.
std::optional<DabcDefinition> make_definition(const miner::DabcRecord& record, std::vector<ParamSpec> params,
                                              bool drop_receiver, std::string provenance, std::string* why = nullptr);

struct DefinitionSet {
  std::vector<DabcDefinition> defs;
  std::vector<std::string> warnings;
};

// Keeps default_value_change records, looks signatures up in `sigs`, drops
// the receiver of methods other than static methods, and assigns unique ids.
DefinitionSet build_definitions(const std::vector<miner::DabcRecord>& records, const sigdiff::SignatureSnapshot& sigs);

enum class BindSource { positional, keyword, unbound };

struct Binding {
  std::map<std::string, BindSource> params;
  bool mismatch = false;
  std::string mismatch_reason;
};

Binding bind_arguments(const DabcDefinition& defn, const CallSite& call);

enum class Verdict { vulnerable, safe, indeterminate };
std::string_view to_string(Verdict v);

struct MatchOutcome {
  std::optional<Verdict> verdict;  // nullopt is no-match
  std::string reason;
};

MatchOutcome match_call(const DabcDefinition& defn, const CallSite& call, const std::set<std::string>& unit_identifiers);

struct VulnerableCall {
  const DabcDefinition* dabc = nullptr;
  CallSite call;
  Verdict verdict = Verdict::vulnerable;
  std::string reason;
};

std::vector<VulnerableCall> scan_client(const pyparse::ParsedUnit& parsed, const std::vector<DabcDefinition>& defs,
                                        bool include_safe = false);

}  // namespace dabc::matcher
