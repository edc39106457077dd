#pragma once

#include <random>
#include <string>

#include "dabc/sigdiff/sigdiff.hpp"

namespace dabc::fixture {

// Snapshot with random keys, kinds and default expressions (quotes, spacing,
// nested brackets) for property tests.
inline sigdiff::SignatureSnapshot random_snapshot(std::mt19937_64& rng) {
  static const char* kDefaults[] = {"None", "0", "1e-3", "'auto'", "\"scale\"", "( 1,  2 )", "[ 'a' ,\"b\" ]",
                                    "np.nan", "lambda x: x + 1", "{'k': (1, 2)}", "'it''s'", "-1", "\"\"", "..."};
  static const char* kNames[] = {"fit", "predict", "transform", "__init__", "score", "concat", "load", "read"};
  static const char* kClasses[] = {"SVC", "KMeans", "DataFrame", "NpzFile", "Pipeline"};
  sigdiff::SignatureSnapshot s;
  s.source_label = "rand-" + std::to_string(rng() % 1000);
  const auto n_entries = rng() % 12;
  for (std::size_t e = 0; e < n_entries; ++e) {
    std::optional<std::string> cls;
    if (rng() % 2) cls = kClasses[rng() % std::size(kClasses)];
    const auto key = sigdiff::fqn_key(cls, kNames[rng() % std::size(kNames)]);
    std::vector<pyparse::ParamSpec> params;
    if (cls) params.push_back({"self", std::nullopt, pyparse::ParamKind::positional_or_keyword});
    const auto n_params = rng() % 7;
    for (std::size_t p = 0; p < n_params; ++p) {
      pyparse::ParamSpec spec;
      spec.name = "p" + std::to_string(p);
      const auto roll = rng() % 10;
      spec.kind = roll < 6   ? pyparse::ParamKind::positional_or_keyword
                  : roll < 9 ? pyparse::ParamKind::keyword_only
                             : pyparse::ParamKind::kwvararg;
      if (spec.kind != pyparse::ParamKind::kwvararg && rng() % 3) spec.default_expr = kDefaults[rng() % std::size(kDefaults)];
      params.push_back(std::move(spec));
    }
    s.entries[key] = std::move(params);
    if (cls && rng() % 5 == 0) s.static_methods.insert(key);
  }
  return s;
}

}  // namespace dabc::fixture
