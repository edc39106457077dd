#include "dabc/sigdiff/sigdiff.hpp"

#include <cctype>
#include <set>
#include <tuple>

#include <json.hpp>

#include "dabc/util/error.hpp"
#include "dabc/util/fs.hpp"
#include "dabc/util/parallel.hpp"
#include "dabc/util/text.hpp"

namespace dabc::sigdiff {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fqn_key(const std::optional<std::string>& class_name, std::string_view function_name) {
  std::string k;
  if (class_name) k = *class_name + ".";
  k += function_name;
  return k;
}

const std::vector<ParamSpec>* SignatureSnapshot::find(const std::optional<std::string>& class_name,
                                                      std::string_view function) const {
  const auto it = entries.find(fqn_key(class_name, function));
  return it == entries.end() ? nullptr : &it->second;
}

bool is_test_path(std::string_view rel_path) {
  std::size_t start = 0;
  while (start <= rel_path.size()) {
    const auto slash = rel_path.find('/', start);
    const auto part = rel_path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    if (slash == std::string_view::npos) return part.substr(0, 5) == "test_" || part == "conftest.py";
    if (part == "tests" || part == "test") return true;
    start = slash + 1;
  }
  return false;
}

void add_defs(SignatureSnapshot& snap, const std::vector<pyparse::FunctionDef>& defs, std::string_view rel_path,
              std::vector<std::string>& warnings) {
  const bool test_code = is_test_path(rel_path);
  for (const auto& d : defs) {
    const auto key = fqn_key(d.class_name, d.function_name);
    const auto where = std::string(rel_path) + ":" + std::to_string(d.span.first);
    const auto prev = snap.origins.find(key);
    if (prev != snap.origins.end()) {
      const bool replace = !test_code || is_test_path(prev->second);
      warnings.push_back("duplicate key " + key + ": " + where + (replace ? " replaces " : " ignored, keeping ") +
                         prev->second);
      if (!replace) continue;
    }
    snap.origins[key] = std::string(rel_path);
    snap.entries[key] = d.params;
    if (d.class_name && d.has_decorator("staticmethod")) {
      snap.static_methods.insert(key);
    } else {
      snap.static_methods.erase(key);
    }
  }
}

SnapshotResult snapshot(const fs::path& root, std::string label, std::size_t jobs) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw InputError(root, "not a directory");
  const auto files = fsutil::list_files(root, {".py"});
  struct PerFile {
    std::vector<pyparse::FunctionDef> defs;
    std::string error;
  };
  auto parsed = parallel_map<PerFile>(files.size(), jobs, [&](std::size_t i) {
    PerFile r;
    try {
      r.defs = pyparse::parse_unit(pyparse::load_unit(files[i])).defs;
    } catch (const Error& e) {
      r.error = e.what();
    }
    return r;
  });
  SnapshotResult out;
  out.snapshot.source_label = std::move(label);
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto rel = fsutil::relative_generic(files[i], root);
    if (!parsed[i].error.empty()) {
      ++out.files_failed;
      out.warnings.push_back(rel + ": " + parsed[i].error);
      continue;
    }
    add_defs(out.snapshot, parsed[i].defs, rel, out.warnings);
  }
  return out;
}

std::string_view to_string(DiffKind k) {
  switch (k) {
    case DiffKind::value_changed:
      return "value_changed";
    case DiffKind::default_added:
      return "default_added";
    case DiffKind::default_removed:
      return "default_removed";
  }
  return "value_changed";
}

std::string normalize_default(std::string_view s) {
  std::string out;
  bool pending_space = false;
  auto emit_sep = [&](char next) {
    if (pending_space && !out.empty() && std::string_view("([{").find(out.back()) == std::string_view::npos &&
        std::string_view(")]},:").find(next) == std::string_view::npos)
      out.push_back(' ');
    pending_space = false;
  };
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      ++i;
      continue;
    }
    emit_sep(c);
    if (c != '\'' && c != '"') {
      out.push_back(c);
      ++i;
      continue;
    }
    const bool triple = s.substr(i, 3) == std::string(3, c);
    const std::size_t q = triple ? 3 : 1;
    std::size_t j = i + q;
    bool escapes = false;
    while (j < s.size()) {
      if (s[j] == '\\') {
        escapes = true;
        j += 2;
        continue;
      }
      if (s.substr(j, q) == std::string(q, c)) break;
      ++j;
    }
    const std::size_t end = std::min(s.size(), j + q);
    const auto body = s.substr(i + q, std::min(j, s.size()) - (i + q));
    if (c == '\'' && !triple && !escapes && body.find('"') == std::string_view::npos && j < s.size()) {
      out.push_back('"');
      out.append(body);
      out.push_back('"');
    } else {
      out.append(s.substr(i, end - i));
    }
    i = end;
  }
  return out;
}

std::vector<DefaultDiff> diff_defaults(const SignatureSnapshot& old_snap, const SignatureSnapshot& new_snap) {
  std::vector<DefaultDiff> out;
  for (const auto& [key, old_params] : old_snap.entries) {
    const auto it = new_snap.entries.find(key);
    if (it == new_snap.entries.end()) continue;
    std::optional<std::string> cls;
    std::string fn = key;
    if (const auto dot = key.rfind('.'); dot != std::string::npos) {
      cls = key.substr(0, dot);
      fn = key.substr(dot + 1);
    }
    for (const auto& op : old_params) {
      for (const auto& np : it->second) {
        if (np.name != op.name) continue;
        DefaultDiff d{cls, fn, op.name, op.default_expr, np.default_expr, DiffKind::value_changed};
        if (op.default_expr && np.default_expr) {
          if (normalize_default(*op.default_expr) == normalize_default(*np.default_expr)) break;
        } else if (np.default_expr) {
          d.kind = DiffKind::default_added;
        } else if (op.default_expr) {
          d.kind = DiffKind::default_removed;
        } else {
          break;
        }
        out.push_back(std::move(d));
        break;
      }
    }
  }
  return out;
}

Reconciliation reconcile(const std::vector<DefaultDiff>& diffs, const std::vector<miner::DabcRecord>& records) {
  using Triple = std::tuple<std::optional<std::string>, std::string, std::string>;
  Reconciliation r;
  std::vector<bool> used(records.size(), false);
  for (const auto& d : diffs) {
    const Triple key{d.class_name, d.function_name, d.param};
    bool matched = false;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& rec = records[i];
      if (rec.change_kind != miner::ChangeKind::default_value_change || !rec.function_name || !rec.argument) continue;
      if (Triple{rec.class_name, *rec.function_name, *rec.argument} != key) continue;
      if (!matched) r.documented.emplace_back(d, rec);
      matched = true;
      used[i] = true;
    }
    if (!matched) r.undocumented.push_back(d);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!used[i] && records[i].change_kind == miner::ChangeKind::default_value_change) r.doc_only.push_back(records[i]);
  }
  return r;
}

namespace {

json params_to_json(const std::vector<ParamSpec>& params) {
  json arr = json::array();
  for (const auto& p : params) {
    json o;
    o["name"] = p.name;
    o["kind"] = std::string(pyparse::to_string(p.kind));
    if (p.default_expr) o["default"] = *p.default_expr;
    arr.push_back(std::move(o));
  }
  return arr;
}

json diff_to_json(const DefaultDiff& d) {
  json o;
  if (d.class_name) o["class"] = *d.class_name;
  o["function"] = d.function_name;
  o["argument"] = d.param;
  o["diff_kind"] = std::string(to_string(d.kind));
  if (d.old_default) o["old_default"] = *d.old_default;
  if (d.new_default) o["new_default"] = *d.new_default;
  return o;
}

}  // namespace

std::string snapshot_to_json(const SignatureSnapshot& snap) {
  json j;
  j["label"] = snap.source_label;
  json entries = json::object();
  for (const auto& [k, params] : snap.entries) entries[k] = params_to_json(params);
  j["entries"] = std::move(entries);
  j["staticmethods"] = snap.static_methods;
  return j.dump(1, ' ', false, json::error_handler_t::replace) + "\n";
}

SignatureSnapshot snapshot_from_json(std::string_view text_in, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text_in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_object())
    throw InputError(origin, "expected an object with an \"entries\" object");
  SignatureSnapshot snap;
  if (j.contains("label") && j["label"].is_string()) snap.source_label = j["label"].get<std::string>();
  for (const auto& [key, arr] : j["entries"].items()) {
    if (!arr.is_array()) throw InputError(origin, "entry " + key + " is not an array");
    std::vector<ParamSpec> params;
    for (const auto& o : arr) {
      if (!o.is_object() || !o.contains("name") || !o["name"].is_string())
        throw InputError(origin, "entry " + key + ": parameter without a name");
      ParamSpec p;
      p.name = o["name"].get<std::string>();
      const auto kind = pyparse::param_kind_from_string(o.value("kind", "positional_or_keyword"));
      if (!kind) throw InputError(origin, "entry " + key + ": bad kind for " + p.name);
      p.kind = *kind;
      if (o.contains("default")) {
        if (!o["default"].is_string()) throw InputError(origin, "entry " + key + ": default must be a string");
        p.default_expr = o["default"].get<std::string>();
      }
      params.push_back(std::move(p));
    }
    snap.entries[key] = std::move(params);
  }
  if (j.contains("staticmethods")) {
    if (!j["staticmethods"].is_array()) throw InputError(origin, "\"staticmethods\" must be an array");
    for (const auto& k : j["staticmethods"]) {
      if (!k.is_string()) throw InputError(origin, "\"staticmethods\" entries must be strings");
      snap.static_methods.insert(k.get<std::string>());
    }
  }
  return snap;
}

SignatureSnapshot read_snapshot(const fs::path& path) {
  return snapshot_from_json(text::sanitize_utf8(fsutil::read_text(path)), path.generic_string());
}

std::string reconciliation_to_json(const Reconciliation& r, std::string_view old_label, std::string_view new_label) {
  json j;
  j["old"] = std::string(old_label);
  j["new"] = std::string(new_label);
  json documented = json::array();
  for (const auto& [d, rec] : r.documented) {
    json o = diff_to_json(d);
    o["version"] = rec.version;
    o["dabc_url"] = rec.dabc_url;
    documented.push_back(std::move(o));
  }
  json undocumented = json::array();
  for (const auto& d : r.undocumented) undocumented.push_back(diff_to_json(d));
  json doc_only = json::array();
  for (const auto& rec : r.doc_only) doc_only.push_back(nlohmann::ordered_json::parse(miner::record_to_json_line(rec)));
  j["counts"] = {{"documented", r.documented.size()},
                 {"undocumented", r.undocumented.size()},
                 {"doc_only", r.doc_only.size()}};
  j["documented"] = std::move(documented);
  j["undocumented"] = std::move(undocumented);
  j["doc_only"] = std::move(doc_only);
  return j.dump(1, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace dabc::sigdiff
