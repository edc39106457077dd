#include "dabc/matcher/matcher.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

namespace dabc::matcher {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::vulnerable:
      return "vulnerable";
    case Verdict::safe:
      return "safe";
    case Verdict::indeterminate:
      return "indeterminate";
  }
  return "vulnerable";
}

std::optional<DabcDefinition> make_definition(const miner::DabcRecord& record, std::vector<ParamSpec> params,
                                              bool drop_receiver, std::string provenance, std::string* why) {
  auto reject = [&](std::string msg) -> std::optional<DabcDefinition> {
    if (why) *why = std::move(msg);
    return std::nullopt;
  };
  if (record.change_kind != miner::ChangeKind::default_value_change) return reject("not a default_value_change");
  if (!record.function_name || !record.argument) return reject("record has no function or argument");
  if (drop_receiver && !params.empty() &&
      (params.front().kind == ParamKind::positional_or_keyword || params.front().kind == ParamKind::positional_only))
    params.erase(params.begin());
  const bool found = std::any_of(params.begin(), params.end(), [&](const ParamSpec& p) {
    return p.name == *record.argument && p.kind != ParamKind::vararg && p.kind != ParamKind::kwvararg;
  });
  if (!found) return reject("argument '" + *record.argument + "' not in the signature");
  DabcDefinition d;
  d.record = record;
  d.class_name = record.class_name;
  d.callable_name = *record.function_name == "__init__" && record.class_name ? *record.class_name : *record.function_name;
  d.params = std::move(params);
  d.changed_param = *record.argument;
  d.dabc_id = record.fqn_text();
  d.provenance = std::move(provenance);
  return d;
}

DefinitionSet build_definitions(const std::vector<miner::DabcRecord>& records, const sigdiff::SignatureSnapshot& sigs) {
  DefinitionSet out;
  for (const auto& r : records) {
    if (r.change_kind != miner::ChangeKind::default_value_change) continue;
    if (!r.function_name || !r.argument) {
      out.warnings.push_back(r.dabc_url + ": default_value_change record without function/argument, skipped");
      continue;
    }
    const auto* params = sigs.find(r.class_name, *r.function_name);
    if (!params) {
      out.warnings.push_back(r.fqn_text() + ": no signature for " + sigdiff::fqn_key(r.class_name, *r.function_name) +
                             ", skipped");
      continue;
    }
    const auto key = sigdiff::fqn_key(r.class_name, *r.function_name);
    const bool drop = r.class_name.has_value() && !sigs.static_methods.count(key);
    std::string why;
    auto d = make_definition(r, *params, drop, sigs.source_label, &why);
    if (!d) {
      out.warnings.push_back(r.fqn_text() + ": " + why + ", skipped");
      continue;
    }
    out.defs.push_back(std::move(*d));
  }
  // the same fqn changed in several versions: disambiguate by version
  std::unordered_map<std::string, int> seen;
  for (const auto& d : out.defs) ++seen[d.dabc_id];
  for (auto& d : out.defs) {
    if (seen[d.dabc_id] > 1) d.dabc_id += "@" + d.record.version;
  }
  return out;
}

namespace {

bool positional_slot(ParamKind k) { return k == ParamKind::positional_only || k == ParamKind::positional_or_keyword; }

}  // namespace

Binding bind_arguments(const DabcDefinition& defn, const CallSite& call) {
  Binding b;
  std::vector<const ParamSpec*> slots;
  bool has_vararg = false, has_kwvararg = false;
  for (const auto& p : defn.params) {
    b.params[p.name] = BindSource::unbound;
    if (positional_slot(p.kind)) slots.push_back(&p);
    if (p.kind == ParamKind::vararg) has_vararg = true;
    if (p.kind == ParamKind::kwvararg) has_kwvararg = true;
  }
  const std::size_t n = call.positional_args.size();
  if (n > slots.size() && !has_vararg) {
    b.mismatch = true;
    b.mismatch_reason = "takes " + std::to_string(slots.size()) + " positional arguments but " + std::to_string(n) +
                        " were given";
    return b;
  }
  // positionals written after a *expansion land at unknown slots; bind only those before it
  const std::size_t bound_pos = std::min({n, slots.size(), call.star_args_position.value_or(n)});
  for (std::size_t i = 0; i < bound_pos; ++i) b.params[slots[i]->name] = BindSource::positional;
  for (const auto& [key, value] : call.keyword_args) {
    (void)value;
    const auto it = std::find_if(defn.params.begin(), defn.params.end(), [&](const ParamSpec& p) {
      return p.name == key && (p.kind == ParamKind::positional_or_keyword || p.kind == ParamKind::keyword_only);
    });
    if (it == defn.params.end()) {
      if (has_kwvararg) continue;
      b.mismatch = true;
      b.mismatch_reason = "unexpected keyword argument '" + key + "'";
      return b;
    }
    auto& slot = b.params[key];
    if (slot != BindSource::unbound) {
      b.mismatch = true;
      b.mismatch_reason = "multiple values for argument '" + key + "'";
      return b;
    }
    slot = BindSource::keyword;
  }
  return b;
}

MatchOutcome match_call(const DabcDefinition& defn, const CallSite& call, const std::set<std::string>& unit_identifiers) {
  MatchOutcome m;
  if (call.callee_name != defn.callable_name) {
    m.reason = "callee differs";
    return m;
  }
  if (defn.class_name && !unit_identifiers.count(*defn.class_name)) {
    m.reason = "class " + *defn.class_name + " not in unit";
    return m;
  }
  const std::string recv = call.receiver_text ? "; receiver " + *call.receiver_text : "";
  if (call.has_star_kwargs) {
    m.verdict = Verdict::indeterminate;
    m.reason = "**kwargs expansion" + recv;
    return m;
  }
  const Binding b = bind_arguments(defn, call);
  if (b.mismatch) {
    m.reason = b.mismatch_reason;
    return m;
  }
  const auto src = b.params.at(defn.changed_param);
  if (call.has_star_args && src != BindSource::keyword) {
    std::size_t idx = 0;
    bool reachable = false;
    for (const auto& p : defn.params) {
      if (!positional_slot(p.kind)) continue;
      if (p.name == defn.changed_param) {
        reachable = idx >= *call.star_args_position;
        break;
      }
      ++idx;
    }
    if (reachable) {
      m.verdict = Verdict::indeterminate;
      m.reason = "*args expansion may reach " + defn.changed_param + recv;
      return m;
    }
  }
  if (src == BindSource::unbound) {
    m.verdict = Verdict::vulnerable;
    m.reason = defn.changed_param + " not passed" + recv;
  } else {
    m.verdict = Verdict::safe;
    m.reason = defn.changed_param + (src == BindSource::keyword ? " passed by keyword" : " passed positionally") + recv;
  }
  return m;
}

std::vector<VulnerableCall> scan_client(const pyparse::ParsedUnit& parsed, const std::vector<DabcDefinition>& defs,
                                        bool include_safe) {
  std::unordered_multimap<std::string, const DabcDefinition*> by_name;
  for (const auto& d : defs) by_name.emplace(d.callable_name, &d);
  std::vector<VulnerableCall> out;
  for (const auto& call : parsed.calls) {
    const auto [lo, hi] = by_name.equal_range(call.callee_name);
    for (auto it = lo; it != hi; ++it) {
      auto m = match_call(*it->second, call, parsed.identifiers);
      if (!m.verdict) continue;
      if (*m.verdict == Verdict::safe && !include_safe) continue;
      out.push_back({it->second, call, *m.verdict, std::move(m.reason)});
    }
  }
  std::sort(out.begin(), out.end(), [](const VulnerableCall& a, const VulnerableCall& b) {
    return std::tie(a.call.location.path, a.call.location.line, a.call.location.column, a.dabc->dabc_id) <
           std::tie(b.call.location.path, b.call.location.line, b.call.location.column, b.dabc->dabc_id);
  });
  return out;
}

}  // namespace dabc::matcher
