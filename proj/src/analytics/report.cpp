#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include <json.hpp>

#include "dabc/analytics/analytics.hpp"
#include "dabc/util/csv.hpp"
#include "dabc/util/fs.hpp"
#include "dabc/util/text.hpp"

namespace dabc::analytics {

std::string classify_module(std::string_view record_path, const ModuleMapping& mapping) {
  const std::pair<std::string, std::string>* best = nullptr;
  for (const auto& entry : mapping) {
    if (record_path.substr(0, entry.first.size()) != entry.first) continue;
    if (!best || entry.first.size() > best->first.size()) best = &entry;
  }
  return best ? best->second : "Others";
}

ModuleMapping parse_mapping(std::string_view text_in, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text_in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_array()) throw InputError(origin, "expected a JSON array of {prefix, module}");
  ModuleMapping out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& o = j[i];
    if (!o.is_object() || !o.contains("prefix") || !o.contains("module") || !o["prefix"].is_string() ||
        !o["module"].is_string())
      throw InputError(origin, "entry " + std::to_string(i) + ": expected string fields prefix and module");
    out.emplace_back(o["prefix"].get<std::string>(), o["module"].get<std::string>());
  }
  return out;
}

ModuleMapping read_mapping(const std::filesystem::path& path) {
  return parse_mapping(fsutil::read_text(path), path.generic_string());
}

std::vector<std::string> percentages(const std::vector<std::size_t>& counts) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::vector<std::size_t> tenths(counts.size(), 0);
  if (total > 0) {
    // round half up, then pull the sum back within one tenth of 100 by
    // moving the rows with the largest rounding error
    std::size_t sum = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      tenths[i] = (2 * counts[i] * 1000 + total) / (2 * total);
      sum += tenths[i];
    }
    auto error = [&](std::size_t i) {
      return static_cast<long double>(tenths[i]) * total - static_cast<long double>(counts[i]) * 1000;
    };
    while (sum > 1001) {
      std::size_t pick = counts.size();
      for (std::size_t i = 0; i < counts.size(); ++i) {
        if (tenths[i] > 0 && (pick == counts.size() || error(i) > error(pick))) pick = i;
      }
      --tenths[pick];
      --sum;
    }
    while (sum < 999) {
      std::size_t pick = 0;
      for (std::size_t i = 1; i < counts.size(); ++i) {
        if (error(i) < error(pick)) pick = i;
      }
      ++tenths[pick];
      ++sum;
    }
  }
  std::vector<std::string> out;
  for (const auto t : tenths) out.push_back(std::to_string(t / 10) + "." + std::to_string(t % 10));
  return out;
}

Table count_table(std::string name, std::string key_column, std::string count_column,
                  const std::map<std::string, std::size_t>& counts) {
  std::vector<std::pair<std::string, std::size_t>> rows(counts.begin(), counts.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::size_t> values;
  for (const auto& r : rows) values.push_back(r.second);
  const auto pct = percentages(values);
  Table t{std::move(name), {std::move(key_column), std::move(count_column), "percent"}, {}};
  for (std::size_t i = 0; i < rows.size(); ++i) t.rows.push_back({rows[i].first, std::to_string(rows[i].second), pct[i]});
  return t;
}

namespace {

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

// "v0.20" and "0.20" are the same release
std::string version_key(const std::string& raw) {
  try {
    return releases::parse_version(raw).canonical();
  } catch (const Error&) {
    return raw;
  }
}

}  // namespace

Report aggregate(const ReportInput& in) {
  Report rep;
  std::map<std::string, std::size_t> by_version, by_module;
  for (const auto& r : in.records) {
    ++by_version[version_key(r.version)];
    ++by_module[classify_module(r.path, in.mapping)];
  }

  Table versions = count_table("versions", "version", "dabcs", by_version);
  if (in.releases) {
    versions.columns.push_back("release_kind");
    versions.columns.push_back("release_date");
    std::map<std::string, std::size_t> by_kind;
    for (const auto& r : in.records) {
      const auto tag = releases::assign_dabc_release(r, in.releases->tags, in.releases->policy);
      if (tag) {
        ++by_kind[std::string(releases::to_string(tag->kind))];
      } else {
        ++by_kind["unassigned"];
        rep.warnings.push_back(r.fqn_text() + ": version " + r.version + " has no matching release tag");
      }
    }
    for (auto& row : versions.rows) {
      miner::DabcRecord probe;
      probe.version = row[0];
      const auto tag = releases::assign_dabc_release(probe, in.releases->tags, in.releases->policy);
      row.push_back(tag ? std::string(releases::to_string(tag->kind)) : "unassigned");
      row.push_back(tag ? tag->date : "");
    }
    rep.tables.push_back(std::move(versions));
    rep.tables.push_back(count_table("releases", "release_kind", "dabcs", by_kind));
  } else {
    rep.tables.push_back(std::move(versions));
  }
  rep.tables.push_back(count_table("modules", "module", "dabcs", by_module));

  std::map<std::string, std::size_t> vuln_by_dabc;
  std::map<std::string, std::set<std::string>> clients_by_dabc;
  std::set<std::string> vulnerable_clients;
  std::size_t n_vuln = 0, n_safe = 0, n_indet = 0;
  for (const auto& c : in.calls) {
    switch (c.verdict) {
      case matcher::Verdict::vulnerable:
        ++n_vuln;
        ++vuln_by_dabc[c.dabc_id];
        clients_by_dabc[c.dabc_id].insert(c.client);
        vulnerable_clients.insert(c.client);
        break;
      case matcher::Verdict::safe:
        ++n_safe;
        break;
      case matcher::Verdict::indeterminate:
        ++n_indet;
        break;
    }
  }
  Table calls = count_table("calls", "dabc", "vulnerable_calls", vuln_by_dabc);
  calls.columns.push_back("clients");
  for (auto& row : calls.rows) row.push_back(std::to_string(clients_by_dabc[row[0]].size()));
  rep.tables.push_back(std::move(calls));

  Table clients{"clients", {"metric", "value"}, {}};
  const auto scanned = in.clients_scanned;
  clients.rows.push_back({"clients_scanned", scanned ? std::to_string(*scanned) : "n/a"});
  clients.rows.push_back({"vulnerable_clients", std::to_string(vulnerable_clients.size())});
  clients.rows.push_back(
      {"vulnerable_clients_percent",
       scanned ? one_decimal(*scanned ? 100.0 * static_cast<double>(vulnerable_clients.size()) / *scanned : 0.0)
               : "n/a"});
  clients.rows.push_back({"vulnerable_calls", std::to_string(n_vuln)});
  clients.rows.push_back({"safe_calls", std::to_string(n_safe)});
  clients.rows.push_back({"indeterminate_calls", std::to_string(n_indet)});
  clients.rows.push_back({"dabcs", std::to_string(in.records.size())});
  rep.tables.push_back(std::move(clients));
  return rep;
}

std::string to_csv(const Table& t) {
  std::string out = csv::format_row(t.columns);
  for (const auto& r : t.rows) out += csv::format_row(r);
  return out;
}

std::string to_markdown(const Table& t) {
  std::string out = "### " + t.name + "\n\n|";
  for (const auto& c : t.columns) out += " " + c + " |";
  out += "\n|";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += i == 0 ? "---|" : "---:|";
  out += "\n";
  for (const auto& r : t.rows) {
    out += "|";
    for (const auto& v : r) out += " " + v + " |";
    out += "\n";
  }
  return out;
}

std::string to_json(const std::vector<Table>& tables) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& t : tables) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < t.columns.size() && i < r.size(); ++i) {
        const auto& v = r[i];
        const bool integral = !v.empty() && v.size() < 19 && v.find_first_not_of("0123456789") == std::string::npos;
        if (integral) {
          o[t.columns[i]] = std::stoull(v);
        } else {
          o[t.columns[i]] = v;
        }
      }
      rows.push_back(std::move(o));
    }
    j[t.name] = std::move(rows);
  }
  return j.dump(1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

}  // namespace dabc::analytics
