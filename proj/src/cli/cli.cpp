#include "dabc/cli/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dabc/analytics/analytics.hpp"
#include "dabc/matcher/matcher.hpp"
#include "dabc/miner/miner.hpp"
#include "dabc/pyparse/parsed_unit.hpp"
#include "dabc/releases/releases.hpp"
#include "dabc/sigdiff/sigdiff.hpp"
#include "dabc/util/csv.hpp"
#include "dabc/util/error.hpp"
#include "dabc/util/fs.hpp"
#include "dabc/util/parallel.hpp"
#include "dabc/util/text.hpp"

namespace dabc::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Options {
  std::string library_root;
  std::string old_root;
  std::string new_root;
  std::string corpus;
  std::string db;
  std::string policy;
  std::string tags;
  std::string mapping;
  std::string out;
  std::vector<std::string> formats;
  bool markdown = false;
  int jobs = 0;
  std::uint64_t seed = 1;
  std::size_t iterations = 1000;
  std::string import_match = "component";
  bool include_safe = false;
  std::string url_base;
  std::string signatures;
  std::string library;
  std::string calls;
  std::string clients;
};

std::size_t effective_jobs(int jobs) {
  if (jobs > 0) return static_cast<std::size_t>(jobs);
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string dump(const ojson& j) { return j.dump(1, ' ', false, ojson::error_handler_t::replace) + "\n"; }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Everything is rendered in memory first; nothing touches disk until the
// command has validated its inputs and finished computing.
class Outputs {
 public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

  void commit(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError(dir, "cannot create output directory: " + ec.message());
    for (const auto& [name, content] : files_) fsutil::write_text(dir / name, content);
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

void require_dir(const std::string& p, const char* flag) {
  std::error_code ec;
  if (p.empty()) throw Error(std::string(flag) + " is required");
  if (!fs::is_directory(p, ec)) throw InputError(p, "not a directory");
}

void require_file(const std::string& p, const char* flag) {
  std::error_code ec;
  if (p.empty()) throw Error(std::string(flag) + " is required");
  if (!fs::is_regular_file(p, ec)) throw InputError(p, "no such file");
}

std::string dir_label(const fs::path& root) {
  auto name = fs::weakly_canonical(root).filename().generic_string();
  return name.empty() ? root.generic_string() : name;
}

struct Formats {
  bool csv = false;
  bool json = false;
  bool markdown = false;
};

// `--markdown` adds markdown to whatever --format selected (csv,json by default).
Formats parse_formats(const std::vector<std::string>& in, bool markdown) {
  Formats f;
  f.markdown = markdown;
  if (in.empty()) {
    f.csv = f.json = true;
    return f;
  }
  for (const auto& s : in) {
    if (s == "csv") {
      f.csv = true;
    } else if (s == "json") {
      f.json = true;
    } else if (s == "markdown") {
      f.markdown = true;
    } else {
      throw Error("unknown format '" + s + "' (expected csv, json or markdown)");
    }
  }
  return f;
}

void emit_tables(Outputs& outputs, const std::string& stem, const std::vector<analytics::Table>& tables,
                 const Formats& f, const std::string& md_preamble = {}) {
  if (f.csv) {
    for (const auto& t : tables) outputs.add(stem + "_" + t.name + ".csv", analytics::to_csv(t));
  }
  if (f.json) outputs.add(stem + ".json", analytics::to_json(tables));
  if (f.markdown) {
    std::string md = md_preamble;
    for (const auto& t : tables) md += (md.empty() ? "" : "\n") + analytics::to_markdown(t);
    outputs.add(stem + ".md", md);
  }
}

// Large trees produce hundreds of warnings; the full list goes to the summary file.
void print_warnings(std::ostream& err, const std::vector<std::string>& warnings, const char* where = nullptr) {
  const std::size_t kShown = where ? 20 : warnings.size();
  for (std::size_t i = 0; i < warnings.size() && i < kShown; ++i) err << "warning: " << warnings[i] << "\n";
  if (warnings.size() > kShown) err << "warning: ... " << warnings.size() - kShown << " more in " << where << "\n";
}

std::optional<releases::ReleasePolicy> policy_or_throw(const std::string& name) {
  if (name.empty()) return std::nullopt;
  auto p = releases::policy_for(name);
  if (!p) throw Error("unknown policy '" + name + "'");
  return p;
}

// ---------------------------------------------------------------- mine

int cmd_mine(const Options& o, std::ostream& out, std::ostream& err) {
  require_dir(o.library_root, "--library-root");
  if (o.out.empty()) throw Error("--out is required");
  const fs::path root = o.library_root;
  const std::size_t jobs = effective_jobs(o.jobs);
  const std::string label = dir_label(root);
  const std::string url_base = o.url_base.empty() ? label : o.url_base;

  auto scan = miner::scan_directives(root, jobs);
  auto snap = sigdiff::snapshot(root, label, jobs);

  std::vector<miner::DabcRecord> records;
  std::map<std::string, std::size_t> kinds = {
      {"default_value_change", 0}, {"type_change", 0}, {"other", 0}, {"needs_review", 0}};
  for (const auto& hit : scan.hits) {
    const auto cls = miner::classify_change(hit.description, hit.enclosing_param.has_value());
    records.push_back(miner::build_record(hit, cls, url_base));
    ++kinds[std::string(miner::to_string(records.back().change_kind))];
  }

  ojson summary;
  summary["library_root"] = label;
  summary["files_scanned"] = scan.files_scanned;
  summary["files_unparsed"] = scan.files_unparsed;
  summary["hits"] = scan.hits.size();
  summary["change_kinds"] = kinds;
  summary["signatures"] = snap.snapshot.entries.size();
  std::vector<std::string> warnings = scan.warnings;
  warnings.insert(warnings.end(), snap.warnings.begin(), snap.warnings.end());
  summary["warnings"] = warnings;

  Outputs outputs;
  outputs.add("dabc.jsonl", miner::write_db(records));
  outputs.add("signatures.json", sigdiff::snapshot_to_json(snap.snapshot));
  outputs.add("summary.json", dump(summary));
  outputs.commit(o.out);

  print_warnings(err, warnings, "summary.json");
  out << "mine: " << scan.hits.size() << " directive hits in " << scan.files_scanned << " files ("
      << kinds["default_value_change"] << " default_value_change, " << kinds["type_change"] << " type_change, "
      << kinds["other"] << " other, " << kinds["needs_review"] << " needs_review)\n";
  return scan.files_unparsed > 0 || snap.files_failed > 0 ? kPartial : kOk;
}

// ---------------------------------------------------------------- sigdiff

int cmd_sigdiff(const Options& o, std::ostream& out, std::ostream& err) {
  require_dir(o.old_root, "--old-root");
  require_dir(o.new_root, "--new-root");
  if (!o.db.empty()) require_file(o.db, "--db");
  if (o.out.empty()) throw Error("--out is required");
  const auto records = o.db.empty() ? std::vector<miner::DabcRecord>{} : miner::read_db(o.db);
  const std::size_t jobs = effective_jobs(o.jobs);
  const auto old_snap = sigdiff::snapshot(o.old_root, dir_label(o.old_root), jobs);
  const auto new_snap = sigdiff::snapshot(o.new_root, dir_label(o.new_root), jobs);
  const auto diffs = sigdiff::diff_defaults(old_snap.snapshot, new_snap.snapshot);
  const auto rec = sigdiff::reconcile(diffs, records);

  Outputs outputs;
  outputs.add("sigdiff.json",
              sigdiff::reconciliation_to_json(rec, old_snap.snapshot.source_label, new_snap.snapshot.source_label));
  outputs.commit(o.out);

  auto warnings = old_snap.warnings;
  warnings.insert(warnings.end(), new_snap.warnings.begin(), new_snap.warnings.end());
  print_warnings(err, warnings);
  out << "sigdiff: " << diffs.size() << " default changes (" << rec.documented.size() << " documented, "
      << rec.undocumented.size() << " undocumented), " << rec.doc_only.size() << " documented without a diff\n";
  return old_snap.files_failed + new_snap.files_failed > 0 ? kPartial : kOk;
}

// ---------------------------------------------------------------- scan

struct UnitResult {
  std::string rel;
  std::string error;
  bool importing = false;
  bool partial = false;
  pyparse::UnitKind kind = pyparse::UnitKind::script;
  analytics::StructuralMetrics metrics;
  std::vector<matcher::VulnerableCall> calls;
  std::vector<std::string> warnings;
};

std::string call_json(const matcher::VulnerableCall& c) {
  ojson j;
  j["dabc"] = c.dabc->dabc_id;
  j["version"] = c.dabc->record.version;
  j["path"] = c.call.location.path;
  j["line"] = c.call.location.line;
  j["column"] = c.call.location.column;
  if (c.call.location.cell) j["cell"] = *c.call.location.cell;
  j["callee"] = c.call.callee_name;
  if (c.call.receiver_text) j["receiver"] = *c.call.receiver_text;
  j["verdict"] = std::string(matcher::to_string(c.verdict));
  j["reason"] = c.reason;
  return j.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

int cmd_scan(const Options& o, std::ostream& out, std::ostream& err) {
  require_file(o.db, "--db");
  require_dir(o.corpus, "--corpus");
  if (o.out.empty()) throw Error("--out is required");
  std::string token = o.library;
  if (token.empty() && !o.policy.empty() && o.policy != "semver") token = o.policy;
  if (token.empty()) throw Error("--library (or a library --policy) is required to filter importing units");
  const auto mode = o.import_match == "substring" ? pyparse::ImportMatch::substring : pyparse::ImportMatch::component;
  const std::size_t jobs = effective_jobs(o.jobs);

  const auto records = miner::read_db(o.db);
  sigdiff::SignatureSnapshot sigs;
  std::vector<std::string> sig_warnings;
  if (!o.signatures.empty()) {
    require_file(o.signatures, "--signatures");
    sigs = sigdiff::read_snapshot(o.signatures);
  } else if (!o.library_root.empty()) {
    require_dir(o.library_root, "--library-root");
    auto snap = sigdiff::snapshot(o.library_root, dir_label(o.library_root), jobs);
    sigs = std::move(snap.snapshot);
    sig_warnings = std::move(snap.warnings);
  } else {
    throw Error("--signatures or --library-root is required to resolve DABC signatures");
  }
  const auto defs = matcher::build_definitions(records, sigs);

  const fs::path corpus = o.corpus;
  const auto files = fsutil::list_files(corpus, {".py", ".ipynb"});
  auto results = parallel_map<UnitResult>(files.size(), jobs, [&](std::size_t i) {
    UnitResult r;
    r.rel = fsutil::relative_generic(files[i], corpus);
    try {
      auto unit = pyparse::load_unit(files[i]);
      unit.path = r.rel;
      r.kind = unit.kind;
      auto parsed = pyparse::parse_unit(unit);
      r.importing = pyparse::unit_imports_library(parsed, token, mode);
      if (!r.importing) return r;
      r.partial = parsed.partial;
      for (const auto& w : parsed.warnings) r.warnings.push_back(r.rel + ": " + w);
      r.metrics = analytics::compute_metrics(parsed);
      r.calls = matcher::scan_client(parsed, defs.defs, true);
    } catch (const InputError& e) {
      r.error = r.rel + ": " + e.reason();
    } catch (const Error& e) {
      r.error = r.rel + ": " + e.what();
    }
    return r;
  });

  std::string jsonl;
  std::string calls_csv = csv::format_row({"path", "line", "column", "cell", "dabc", "callee", "receiver", "verdict",
                                           "reason"});
  csv::Row header = {"path", "kind", "partial", "vulnerable_calls", "safe_calls", "indeterminate_calls"};
  for (const auto& [name, v] : analytics::metric_columns({})) header.push_back(name);
  std::string clients_csv = csv::format_row(header);

  std::size_t n_failed = 0, n_importing = 0, n_partial = 0, n_vuln_clients = 0;
  std::map<matcher::Verdict, std::size_t> verdicts;
  std::vector<std::string> warnings = defs.warnings;
  warnings.insert(warnings.end(), sig_warnings.begin(), sig_warnings.end());
  for (const auto& r : results) {
    if (!r.error.empty()) {
      ++n_failed;
      warnings.push_back(r.error);
      continue;
    }
    if (!r.importing) continue;
    ++n_importing;
    if (r.partial) ++n_partial;
    warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    std::map<matcher::Verdict, std::size_t> unit_counts;
    for (const auto& c : r.calls) {
      ++unit_counts[c.verdict];
      ++verdicts[c.verdict];
      if (c.verdict == matcher::Verdict::safe && !o.include_safe) continue;
      jsonl += call_json(c) + "\n";
      const auto& loc = c.call.location;
      calls_csv += csv::format_row({loc.path, std::to_string(loc.line), std::to_string(loc.column),
                                    loc.cell ? std::to_string(*loc.cell) : "", c.dabc->dabc_id, c.call.callee_name,
                                    c.call.receiver_text.value_or(""), std::string(matcher::to_string(c.verdict)),
                                    c.reason});
    }
    if (unit_counts[matcher::Verdict::vulnerable] > 0) ++n_vuln_clients;
    csv::Row row = {r.rel,
                    r.kind == pyparse::UnitKind::notebook ? "notebook" : "script",
                    r.partial ? "true" : "false",
                    std::to_string(unit_counts[matcher::Verdict::vulnerable]),
                    std::to_string(unit_counts[matcher::Verdict::safe]),
                    std::to_string(unit_counts[matcher::Verdict::indeterminate])};
    for (const auto& [name, v] : analytics::metric_columns(r.metrics)) row.push_back(std::to_string(v));
    clients_csv += csv::format_row(row);
  }

  ojson summary;
  summary["library"] = token;
  summary["import_match"] = o.import_match;
  summary["definitions"] = defs.defs.size();
  summary["units_found"] = files.size();
  summary["units_failed"] = n_failed;
  summary["units_importing"] = n_importing;
  summary["units_partial"] = n_partial;
  summary["vulnerable_calls"] = verdicts[matcher::Verdict::vulnerable];
  summary["safe_calls"] = verdicts[matcher::Verdict::safe];
  summary["indeterminate_calls"] = verdicts[matcher::Verdict::indeterminate];
  summary["vulnerable_clients"] = n_vuln_clients;
  summary["warnings"] = warnings;

  Outputs outputs;
  outputs.add("vulnerable_calls.jsonl", jsonl);
  outputs.add("vulnerable_calls.csv", calls_csv);
  outputs.add("clients.csv", clients_csv);
  outputs.add("scan_summary.json", dump(summary));
  outputs.commit(o.out);

  print_warnings(err, warnings, "scan_summary.json");
  out << "scan: " << files.size() << " units, " << n_importing << " import " << token << ", " << n_failed
      << " skipped; " << verdicts[matcher::Verdict::vulnerable] << " vulnerable calls in " << n_vuln_clients
      << " clients, " << verdicts[matcher::Verdict::indeterminate] << " indeterminate\n";
  return n_failed > 0 ? kPartial : kOk;
}

// ---------------------------------------------------------------- report

std::vector<analytics::CallRow> read_calls(const fs::path& path) {
  const std::string origin = path.generic_string();
  const auto content = text::sanitize_utf8(fsutil::read_text(path));
  std::vector<analytics::CallRow> rows;
  const auto lines = text::split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (text::is_blank(lines[n])) continue;
    const std::string where = "line " + std::to_string(n + 1) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[n]);
    } catch (const nlohmann::json::exception&) {
      throw InputError(origin, where + "invalid JSON");
    }
    for (const char* k : {"dabc", "path", "verdict"}) {
      if (!j.is_object() || !j.contains(k) || !j[k].is_string())
        throw InputError(origin, where + "missing string key '" + k + "'");
    }
    analytics::CallRow r{j["dabc"].get<std::string>(), j["path"].get<std::string>(), matcher::Verdict::vulnerable};
    const auto v = j["verdict"].get<std::string>();
    if (v == "safe") {
      r.verdict = matcher::Verdict::safe;
    } else if (v == "indeterminate") {
      r.verdict = matcher::Verdict::indeterminate;
    } else if (v != "vulnerable") {
      throw InputError(origin, where + "bad verdict '" + v + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

struct ClientsTable {
  std::vector<std::string> header;
  std::vector<csv::Row> rows;

  std::size_t column(const std::string& name, const std::string& origin) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError(origin, "line 1: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

ClientsTable read_clients(const fs::path& path) {
  const std::string origin = path.generic_string();
  std::vector<csv::Row> rows;
  try {
    rows = csv::parse(fsutil::read_text(path));
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(origin, e.what());
  }
  if (rows.empty()) throw InputError(origin, "line 1: missing header");
  ClientsTable t;
  t.header = rows.front();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != t.header.size())
      throw InputError(origin, "line " + std::to_string(i + 1) + ": expected " + std::to_string(t.header.size()) +
                                   " fields");
    t.rows.push_back(std::move(rows[i]));
  }
  return t;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  require_file(o.db, "--db");
  if (o.out.empty()) throw Error("--out is required");
  const auto formats = parse_formats(o.formats, o.markdown);
  analytics::ReportInput in;
  in.records = miner::read_db(o.db);
  if (!o.calls.empty()) {
    require_file(o.calls, "--calls");
    in.calls = read_calls(o.calls);
  }
  if (!o.clients.empty()) {
    require_file(o.clients, "--clients");
    in.clients_scanned = read_clients(o.clients).rows.size();
  }
  if (!o.tags.empty()) {
    require_file(o.tags, "--tags");
    const auto policy = policy_or_throw(o.policy);
    if (!policy) throw Error("--tags needs --policy");
    in.releases = analytics::ReleaseInfo{releases::read_tag_manifest(o.tags, *policy), *policy};
  }
  if (!o.mapping.empty()) {
    require_file(o.mapping, "--mapping");
    in.mapping = analytics::read_mapping(o.mapping);
  }
  const auto rep = analytics::aggregate(in);

  Outputs outputs;
  emit_tables(outputs, "report", rep.tables, formats);
  outputs.commit(o.out);

  for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
  std::set<std::string> versions;
  for (const auto& r : in.records) versions.insert(r.version);
  out << "report: " << in.records.size() << " records across " << versions.size() << " versions, " << in.calls.size()
      << " call rows\n";
  return kOk;
}

// ---------------------------------------------------------------- stats

int cmd_stats(const Options& o, std::ostream& out, std::ostream& /*err*/) {
  require_file(o.clients, "--clients");
  if (o.out.empty()) throw Error("--out is required");
  if (o.iterations < 100) throw Error("--iterations must be at least 100");
  const auto formats = parse_formats(o.formats, o.markdown);
  const std::string origin = fs::path(o.clients).generic_string();
  const auto clients = read_clients(o.clients);

  auto numeric_column = [&](const std::string& name) {
    const auto c = clients.column(name, origin);
    std::vector<double> v;
    for (std::size_t i = 0; i < clients.rows.size(); ++i) {
      const auto& s = clients.rows[i][c];
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw InputError(origin, "line " + std::to_string(i + 2) + ": column '" + name + "' is not a count");
      v.push_back(std::stod(s));
    }
    return v;
  };
  const auto calls = numeric_column("vulnerable_calls");
  std::vector<std::pair<std::string, std::vector<double>>> metrics;
  for (const auto& [name, v] : analytics::metric_columns({})) metrics.emplace_back(name, numeric_column(name));

  analytics::Table t{"correlations", {"metric", "coefficient", "level", "p_value", "n", "significant", "status"}, {}};
  std::size_t defined = 0;
  for (const auto& [name, xs] : metrics) {
    try {
      const auto r = analytics::correlate(xs, calls, o.iterations, o.seed);
      t.rows.push_back({name, fixed(r.coefficient, 4), std::string(analytics::to_string(r.level)), fixed(r.p_value, 4),
                        std::to_string(r.n), r.p_value <= 0.05 ? "yes" : "no", "ok"});
      ++defined;
    } catch (const analytics::CorrelationUndefined&) {
      t.rows.push_back({name, "", "", "", std::to_string(xs.size()), "", "undefined"});
    }
  }
  // not computable from a single unit
  for (const char* name : {"extended_comments_loc", "cell_coupling", "function_coupling", "npavg"})
    t.rows.push_back({name, "", "", "", "", "", "unavailable"});

  analytics::Table notes{"notes", {"metric", "note"}, {}};
  notes.rows.push_back({"api_calls_count",
                        "calls whose callee or receiver head is a name bound by an import in the same unit"});
  notes.rows.push_back({"extended_comments_loc", "no operational definition available; not computed"});
  notes.rows.push_back({"p_value", "two-sided permutation test, " + std::to_string(o.iterations) +
                                       " iterations, seed " + std::to_string(o.seed)});

  Outputs outputs;
  emit_tables(outputs, "stats", {t, notes}, formats);
  outputs.commit(o.out);
  out << "stats: " << clients.rows.size() << " clients, " << defined << " of " << metrics.size()
      << " metrics correlated\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color) {
  Options o;
  CLI::App app{"Default-argument breaking change toolkit", "dabc"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--jobs", o.jobs, "worker threads (0: all cores)");
  };
  auto add_formats = [&](CLI::App* sub) {
    sub->add_option("--format", o.formats, "csv,json,markdown")->delimiter(',');
    sub->add_flag("--markdown", o.markdown, "also render markdown tables");
  };
  const std::set<std::string> policies = {"sklearn", "pandas", "numpy", "semver"};

  auto* mine = app.add_subcommand("mine", "mine versionchanged directives into a DABC database");
  mine->add_option("--library-root", o.library_root, "library checkout");
  mine->add_option("--url-base", o.url_base, "prefix for dabc_url (default: root directory name)");
  add_common(mine);

  auto* sigdiff_cmd = app.add_subcommand("sigdiff", "diff defaults between two checkouts");
  sigdiff_cmd->add_option("--old-root", o.old_root, "older library checkout");
  sigdiff_cmd->add_option("--new-root", o.new_root, "newer library checkout");
  sigdiff_cmd->add_option("--db", o.db, "DABC database to reconcile against");
  add_common(sigdiff_cmd);

  auto* scan = app.add_subcommand("scan", "find client calls exposed to DABCs");
  scan->add_option("--db", o.db, "DABC database (dabc.jsonl)");
  scan->add_option("--corpus", o.corpus, "client directory of .py and .ipynb units");
  scan->add_option("--signatures", o.signatures, "signatures.json written by mine");
  scan->add_option("--library-root", o.library_root, "library checkout (alternative to --signatures)");
  scan->add_option("--library", o.library, "import token filtering client units");
  scan->add_option("--policy", o.policy, "library policy; its name is the default import token")->check(CLI::IsMember(policies));
  scan->add_option("--import-match", o.import_match, "how the import token matches module paths")->check(CLI::IsMember({"component", "substring"}));
  scan->add_flag("--include-safe", o.include_safe, "also write safe calls");
  add_common(scan);

  auto* report = app.add_subcommand("report", "aggregate DABC and call tables");
  report->add_option("--db", o.db, "DABC database (dabc.jsonl)");
  report->add_option("--calls", o.calls, "vulnerable_calls.jsonl written by scan");
  report->add_option("--clients", o.clients, "clients.csv written by scan");
  report->add_option("--policy", o.policy, "release policy for --tags")->check(CLI::IsMember(policies));
  report->add_option("--tags", o.tags, "release manifest CSV (version,date)");
  report->add_option("--mapping", o.mapping, "module mapping JSON");
  add_formats(report);
  add_common(report);

  auto* stats = app.add_subcommand("stats", "Spearman correlation of metrics with vulnerable calls");
  stats->add_option("--clients", o.clients, "clients.csv written by scan");
  stats->add_option("--seed", o.seed, "permutation seed");
  stats->add_option("--iterations", o.iterations, "permutations for the p-value");
  add_formats(stats);
  add_common(stats);

  auto fail = [&](const std::string& msg) {
    err << (color ? "\033[31merror:\033[0m " : "error: ") << msg << "\n";
    return kFatal;
  };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);  // --help
      return kOk;
    }
    return fail(e.what());
  }

  try {
    if (mine->parsed()) return cmd_mine(o, out, err);
    if (sigdiff_cmd->parsed()) return cmd_sigdiff(o, out, err);
    if (scan->parsed()) return cmd_scan(o, out, err);
    if (report->parsed()) return cmd_report(o, out, err);
    if (stats->parsed()) return cmd_stats(o, out, err);
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return fail("no subcommand");
}

}  // namespace dabc::cli
