#include "proxsim/analysis/anova.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/fisher_f.hpp>

namespace proxsim {

double f_survival(double f, double d1, double d2) {
  if (!(f > 0.0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  const boost::math::fisher_f dist(d1, d2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

GroupSummary summarize(std::string label, std::span<const double> values) {
  GroupSummary g;
  g.label = std::move(label);
  g.n = static_cast<int>(values.size());
  if (g.n == 0) return g;
  g.mean = std::accumulate(values.begin(), values.end(), 0.0) / g.n;
  if (g.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - g.mean) * (v - g.mean);
    g.sd = std::sqrt(ss / (g.n - 1));
  }
  return g;
}

namespace {

AnovaResult finish(double ssb, double ssw, int groups, int total) {
  AnovaResult r;
  r.df_between = groups - 1;
  r.df_within = total - groups;
  if (ssb <= 0.0) {
    // Identical group means, including the all-values-identical case.
    r.F = 0.0;
    r.p = 1.0;
    r.cohens_f = 0.0;
    return r;
  }
  if (ssw <= 0.0) {
    r.F = std::numeric_limits<double>::infinity();
    r.p = 0.0;
    r.cohens_f = std::numeric_limits<double>::infinity();
    return r;
  }
  r.F = (ssb / r.df_between) / (ssw / r.df_within);
  r.p = f_survival(r.F, r.df_between, r.df_within);
  r.cohens_f = std::sqrt(ssb / ssw);
  return r;
}

}  // namespace

AnovaResult anova_from_summaries(std::span<const GroupSummary> groups) {
  if (groups.size() < 2) throw std::invalid_argument("ANOVA needs at least two groups");
  int total = 0;
  double weighted = 0.0;
  for (const GroupSummary& g : groups) {
    if (g.n < 2) throw std::invalid_argument("group '" + g.label + "' has n < 2");
    if (g.sd < 0.0) throw std::invalid_argument("group '" + g.label + "' has negative sd");
    total += g.n;
    weighted += g.n * g.mean;
  }
  const double grand = weighted / total;
  double ssb = 0.0, ssw = 0.0;
  for (const GroupSummary& g : groups) {
    ssb += g.n * (g.mean - grand) * (g.mean - grand);
    ssw += (g.n - 1) * g.sd * g.sd;
  }
  return finish(ssb, ssw, static_cast<int>(groups.size()), total);
}

AnovaResult anova(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw std::invalid_argument("ANOVA needs at least two groups");
  int total = 0;
  double sum = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("every group needs n >= 2");
    total += static_cast<int>(g.size());
    sum += std::accumulate(g.begin(), g.end(), 0.0);
  }
  const double grand = sum / total;
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / g.size();
    ssb += g.size() * (mean - grand) * (mean - grand);
    for (double v : g) ssw += (v - mean) * (v - mean);
  }
  return finish(ssb, ssw, static_cast<int>(groups.size()), total);
}

std::vector<double> holm_adjust(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return p[i] < p[j]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double scaled = std::min(1.0, static_cast<double>(m - k) * p[order[k]]);
    running = std::max(running, scaled);
    out[order[k]] = running;
  }
  return out;
}

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double permutation_p_with(std::span<const double> a, std::span<const double> b,
                          int permutations, std::mt19937_64& rng) {
  std::vector<double> pool(a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());
  const double total = std::accumulate(pool.begin(), pool.end(), 0.0);
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const double observed = std::abs(mean_of(a) - mean_of(b));
  // Differences that equal the observed one up to rounding count as ties.
  const double slack = 1e-12 * (1.0 + observed);
  long hits = 0;
  for (int k = 0; k < permutations; ++k) {
    double sa = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      sa += pool[i];
    }
    const double diff = std::abs(sa / na - (total - sa) / nb);
    if (diff >= observed - slack) ++hits;
  }
  return (hits + 1.0) / (permutations + 1.0);
}

std::mt19937_64 pair_rng(std::uint64_t seed, std::uint64_t pair) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(pair), 0x9e37u};
  return std::mt19937_64(seq);
}

}  // namespace

double permutation_p(std::span<const double> a, std::span<const double> b,
                     const PermutationConfig& config) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty group");
  if (config.permutations < 1) throw std::invalid_argument("need at least one permutation");
  std::mt19937_64 rng = pair_rng(config.seed, 0);
  return permutation_p_with(a, b, config.permutations, rng);
}

std::vector<PairwiseResult> pairwise_comparisons(
    std::span<const std::string> labels,
    std::span<const std::vector<double>> groups,
    const PermutationConfig& config) {
  if (labels.size() != groups.size()) {
    throw std::invalid_argument("labels and groups differ in length");
  }
  if (config.permutations < 1) throw std::invalid_argument("need at least one permutation");
  std::vector<PairwiseResult> out;
  std::vector<std::size_t> tested;
  std::vector<double> raw;
  std::uint64_t pair = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j, ++pair) {
      PairwiseResult r;
      r.a = labels[i];
      r.b = labels[j];
      if (!groups[i].empty() && !groups[j].empty()) {
        r.mean_diff = mean_of(groups[i]) - mean_of(groups[j]);
      }
      if (groups[i].size() >= 2 && groups[j].size() >= 2) {
        std::mt19937_64 rng = pair_rng(config.seed, pair);
        r.p = permutation_p_with(groups[i], groups[j], config.permutations, rng);
        tested.push_back(out.size());
        raw.push_back(*r.p);
      }
      out.push_back(std::move(r));
    }
  }
  const std::vector<double> adjusted = holm_adjust(raw);
  for (std::size_t k = 0; k < tested.size(); ++k) out[tested[k]].p_adjusted = adjusted[k];
  return out;
}

}  // namespace proxsim
