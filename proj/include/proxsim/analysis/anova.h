#ifndef PROXSIM_ANALYSIS_ANOVA_H_
#define PROXSIM_ANALYSIS_ANOVA_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace proxsim {

struct GroupSummary {
  std::string label;
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1 denominator)
};

struct AnovaResult {
  double F = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p = 1.0;
  double cohens_f = 0.0;
};

// Upper tail of the F distribution, P(X > f) for X ~ F(d1, d2).
double f_survival(double f, double d1, double d2);

GroupSummary summarize(std::string label, std::span<const double> values);

// One-way between-group ANOVA from per-group (n, mean, sd). Throws
// std::invalid_argument with fewer than two groups or any n < 2.
AnovaResult anova_from_summaries(std::span<const GroupSummary> groups);

// Same analysis on raw values, computed directly from sums of squares.
AnovaResult anova(std::span<const std::vector<double>> groups);

struct PairwiseResult {
  std::string a;
  std::string b;
  double mean_diff = 0.0;             // mean(a) - mean(b)
  std::optional<double> p;            // raw two-sided permutation p
  std::optional<double> p_adjusted;   // Holm step-down
};

struct PermutationConfig {
  int permutations = 10000;
  std::uint64_t seed = 0;
};

// Holm step-down adjustment; the result is monotone in the sorted order and
// capped at 1.
std::vector<double> holm_adjust(std::span<const double> p);

// Two-sided permutation test of the mean difference for one pair.
// p = (1 + #{|perm diff| >= |observed diff|}) / (1 + permutations).
double permutation_p(std::span<const double> a, std::span<const double> b,
                     const PermutationConfig& config);

// All pairs i < j in input order. Pairs involving a group with n < 2 carry
// no p-value and are left out of the Holm family.
std::vector<PairwiseResult> pairwise_comparisons(
    std::span<const std::string> labels,
    std::span<const std::vector<double>> groups,
    const PermutationConfig& config = {});

}  // namespace proxsim

#endif  // PROXSIM_ANALYSIS_ANOVA_H_
