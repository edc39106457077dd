#include <array>
#include <charconv>
#include <regex>
#include <unordered_set>

#include <json.hpp>

#include "dabc/miner/miner.hpp"
#include "dabc/util/error.hpp"
#include "dabc/util/fs.hpp"
#include "dabc/util/text.hpp"

namespace dabc::miner {

namespace {

constexpr std::array<std::pair<ChangeKind, std::string_view>, 4> kKinds = {{
    {ChangeKind::default_value_change, "default_value_change"},
    {ChangeKind::type_change, "type_change"},
    {ChangeKind::other, "other"},
    {ChangeKind::needs_review, "needs_review"},
}};
constexpr std::array<std::pair<Reason, std::string_view>, 4> kReasons = {{
    {Reason::NewFeature, "NewFeature"},
    {Reason::ApiCompatibility, "ApiCompatibility"},
    {Reason::Maintainability, "Maintainability"},
    {Reason::BugFixing, "BugFixing"},
}};
constexpr std::array<std::pair<Effect, std::string_view>, 4> kEffects = {{
    {Effect::Aesthetics, "Aesthetics"},
    {Effect::Behavior, "Behavior"},
    {Effect::Performance, "Performance"},
    {Effect::Refactoring, "Refactoring"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
  for (const auto& [k, s] : table) {
    if (k == v) return s;
  }
  return {};
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s) {
  for (const auto& [k, name] : table) {
    if (name == s) return k;
  }
  return std::nullopt;
}

using svmatch = std::match_results<std::string_view::const_iterator>;

// Y ends before: " in <version>", a sentence stop, the end, a comma or a semicolon.
#define DABC_FROM_TO R"(\bfrom\s+(.+?)\s+to\s+(.+?)(?=\s+in\s+(?:version\s+)?v?\d|\.\s|\.?\s*$|,\s|;))"

const std::regex& default_then_change() {
  static const std::regex re(R"(\bdefault\b.*?\bchange[sd]?\b.*?)" DABC_FROM_TO, std::regex::icase);
  return re;
}
const std::regex& change_then_default() {
  static const std::regex re(R"(\bchange[sd]?\b.*?\bdefault\b.*?)" DABC_FROM_TO, std::regex::icase);
  return re;
}
const std::regex& mentions_default_change() {
  static const std::regex re(R"(\bdefault\b.*\bchange|\bchange.*\bdefault\b)", std::regex::icase);
  return re;
}
const std::regex& type_words() {
  static const std::regex re(
      R"(\b(accept\w*|support\w*|added|option\w*|no longer|deprecated|can now|now also|values|types)\b)",
      std::regex::icase);
  return re;
}

#undef DABC_FROM_TO

}  // namespace

std::string_view to_string(ChangeKind k) { return name_of(kKinds, k); }
std::optional<ChangeKind> change_kind_from_string(std::string_view s) { return value_of(kKinds, s); }
std::string_view to_string(Reason r) { return name_of(kReasons, r); }
std::string_view to_string(Effect e) { return name_of(kEffects, e); }
std::optional<Reason> reason_from_string(std::string_view s) { return value_of(kReasons, s); }
std::optional<Effect> effect_from_string(std::string_view s) { return value_of(kEffects, s); }

Classification classify_change(std::string_view description, bool has_param) {
  Classification c;
  if (!has_param) {
    c.kind = ChangeKind::other;
    return c;
  }
  svmatch m;
  for (const auto* re : {&default_then_change(), &change_then_default()}) {
    if (std::regex_search(description.begin(), description.end(), m, *re)) {
      c.kind = ChangeKind::default_value_change;
      c.old_default = std::string(text::trim(m[1].str()));
      c.new_default = std::string(text::trim(m[2].str()));
      return c;
    }
  }
  if (std::regex_search(description.begin(), description.end(), mentions_default_change())) {
    c.kind = ChangeKind::needs_review;
    return c;
  }
  c.kind = std::regex_search(description.begin(), description.end(), type_words()) ? ChangeKind::type_change
                                                                                    : ChangeKind::needs_review;
  return c;
}

std::string DabcRecord::fqn_text() const {
  std::string s;
  if (class_name) s += *class_name + ".";
  s += function_name.value_or("?");
  s += "(" + argument.value_or("") + ")";
  return s;
}

DabcRecord build_record(const DirectiveHit& hit, const Classification& cls, std::string_view url_base) {
  DabcRecord r;
  r.dabc_msg = hit.description;
  r.version = hit.version;
  r.path = hit.path;
  r.line = hit.line;
  r.dabc_url = std::string(url_base) + "/" + hit.path + "#L" + std::to_string(hit.line);
  if (hit.enclosing_function) {
    r.class_name = hit.enclosing_function->class_name;
    r.function_name = hit.enclosing_function->function_name;
  }
  r.argument = hit.enclosing_param;
  r.change_kind = cls.kind;
  r.old_default = cls.old_default;
  r.new_default = cls.new_default;
  const bool demote = r.change_kind == ChangeKind::default_value_change &&
                      (!r.argument || !r.function_name || hit.attribution == Attribution::class_unverified);
  if (demote) r.change_kind = ChangeKind::needs_review;
  return r;
}

std::optional<std::pair<std::string, int>> parse_dabc_url(std::string_view url, std::string_view url_base) {
  const std::string prefix = std::string(url_base) + "/";
  if (url.substr(0, prefix.size()) != prefix) return std::nullopt;
  url.remove_prefix(prefix.size());
  const auto hash = url.rfind("#L");
  if (hash == std::string_view::npos || hash == 0) return std::nullopt;
  const auto num = url.substr(hash + 2);
  int line = 0;
  const auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), line);
  if (ec != std::errc{} || p != num.data() + num.size() || line <= 0) return std::nullopt;
  return std::make_pair(std::string(url.substr(0, hash)), line);
}

std::vector<std::int64_t> extract_issue_refs(std::string_view msg) {
  std::vector<std::int64_t> out;
  std::unordered_set<std::int64_t> seen;
  for (std::size_t i = 0; i < msg.size(); ++i) {
    if (msg[i] != '#') continue;
    std::size_t j = i + 1;
    while (j < msg.size() && msg[j] >= '0' && msg[j] <= '9') ++j;
    if (j == i + 1) continue;
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(msg.data() + i + 1, msg.data() + j, v);
    if (ec == std::errc{} && seen.insert(v).second) out.push_back(v);
    i = j - 1;
  }
  return out;
}

std::string record_to_json_line(const DabcRecord& r) {
  nlohmann::ordered_json j;
  j["dabc_msg"] = r.dabc_msg;
  j["version"] = r.version;
  j["path"] = r.path;
  if (r.class_name) j["class"] = *r.class_name;
  if (r.function_name) j["function"] = *r.function_name;
  if (r.argument) j["argument"] = *r.argument;
  j["dabc_url"] = r.dabc_url;
  j["change_kind"] = std::string(to_string(r.change_kind));
  if (r.old_default) j["old_default"] = *r.old_default;
  if (r.new_default) j["new_default"] = *r.new_default;
  if (r.reason) j["reason"] = std::string(to_string(*r.reason));
  if (r.effect) j["effect"] = std::string(to_string(*r.effect));
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

std::string write_db(const std::vector<DabcRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json_line(r);
    out += '\n';
  }
  return out;
}

std::vector<DabcRecord> parse_db(std::string_view text_in, const std::string& origin) {
  static const std::unordered_set<std::string> known = {"dabc_msg", "version",     "path",        "class",
                                                        "function", "argument",    "dabc_url",    "change_kind",
                                                        "old_default", "new_default", "reason",   "effect"};
  std::vector<DabcRecord> out;
  const auto lines = text::split_lines(text_in);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (text::is_blank(lines[n])) continue;
    auto fail = [&](const std::string& why) -> InputError {
      return InputError(origin, "line " + std::to_string(n + 1) + ": " + why);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[n]);
    } catch (const nlohmann::json::exception&) {
      throw fail("invalid JSON");
    }
    if (!j.is_object()) throw fail("expected a JSON object");
    for (const auto& [k, v] : j.items()) {
      if (!known.count(k)) throw fail("unknown key '" + k + "'");
      if (!v.is_string()) throw fail("key '" + k + "' must be a string");
    }
    auto req = [&](const char* k) {
      if (!j.contains(k)) throw fail(std::string("missing key '") + k + "'");
      return j[k].get<std::string>();
    };
    auto opt = [&](const char* k) -> std::optional<std::string> {
      if (!j.contains(k)) return std::nullopt;
      return j[k].get<std::string>();
    };
    DabcRecord r;
    r.dabc_msg = req("dabc_msg");
    r.version = req("version");
    r.path = req("path");
    r.dabc_url = req("dabc_url");
    const auto kind = change_kind_from_string(req("change_kind"));
    if (!kind) throw fail("bad change_kind");
    r.change_kind = *kind;
    r.class_name = opt("class");
    r.function_name = opt("function");
    r.argument = opt("argument");
    r.old_default = opt("old_default");
    r.new_default = opt("new_default");
    if (auto s = opt("reason")) {
      r.reason = reason_from_string(*s);
      if (!r.reason) throw fail("bad reason '" + *s + "'");
    }
    if (auto s = opt("effect")) {
      r.effect = effect_from_string(*s);
      if (!r.effect) throw fail("bad effect '" + *s + "'");
    }
    const auto hash = r.dabc_url.rfind("#L");
    if (hash != std::string::npos) {
      const auto num = std::string_view(r.dabc_url).substr(hash + 2);
      std::from_chars(num.data(), num.data() + num.size(), r.line);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DabcRecord> read_db(const std::filesystem::path& path) {
  return parse_db(text::sanitize_utf8(fsutil::read_text(path)), path.generic_string());
}

}  // namespace dabc::miner
