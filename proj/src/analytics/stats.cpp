#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dabc/analytics/analytics.hpp"

namespace dabc::analytics {

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void check_inputs(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw CorrelationUndefined("vectors differ in length");
  if (xs.size() < 2) throw CorrelationUndefined("fewer than 2 observations");
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) throw CorrelationUndefined("constant vector");
}

// Unbiased draw in [0, bound) by rejection; fixed across standard libraries.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  while (true) {
    const std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

}  // namespace

std::string_view to_string(Level l) {
  switch (l) {
    case Level::negligible:
      return "negligible";
    case Level::low:
      return "low";
    case Level::moderate:
      return "moderate";
    case Level::high:
      return "high";
    case Level::very_high:
      return "very_high";
  }
  return "negligible";
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  check_inputs(xs, ys);
  return pearson(average_ranks(xs), average_ranks(ys));
}

double perm_pvalue(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t iterations,
                   std::uint64_t seed) {
  check_inputs(xs, ys);
  const auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  const double observed = std::abs(pearson(rx, ry));
  std::mt19937_64 rng(seed);
  std::size_t hits = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t i = ry.size() - 1; i > 0; --i) std::swap(ry[i], ry[draw_below(rng, i + 1)]);
    if (std::abs(pearson(rx, ry)) >= observed - 1e-12) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(iterations + 1);
}

Level bucket(double coefficient) {
  const double a = std::abs(coefficient);
  if (a < 0.30) return Level::negligible;
  if (a < 0.50) return Level::low;
  if (a < 0.70) return Level::moderate;
  if (a < 0.90) return Level::high;
  return Level::very_high;
}

CorrelationResult correlate(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t iterations,
                            std::uint64_t seed) {
  CorrelationResult r;
  r.n = xs.size();
  r.coefficient = spearman(xs, ys);
  r.level = bucket(r.coefficient);
  r.p_value = perm_pvalue(xs, ys, iterations, seed);
  return r;
}

}  // namespace dabc::analytics
