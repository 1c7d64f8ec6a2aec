#ifndef PROXSIM_ANALYSIS_HIERARCHICAL_H_
#define PROXSIM_ANALYSIS_HIERARCHICAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "proxsim/sim/trajectory_log.h"

namespace proxsim {

// One a_void observation: movement m (1-based, pole tasks only) of trial i.
struct TrendRecord {
  int trial = 0;
  int movement = 0;
  std::string condition;
  double value = 0.0;
};

struct HierarchicalData {
  std::vector<TrendRecord> records;
  int omitted = 0;  // pole tasks dropped for lack of an a_void datum

  // Throws std::invalid_argument if a trial maps to two conditions or its
  // movement indices are not strictly increasing.
  void validate() const;
};

// Flattens logs into trend records; trial ids are positions in `logs` and the
// condition label comes from each log's metadata.
HierarchicalData avoidance_trend_table(std::span<const TrajectoryLog> logs);

// Half-normal priors are on the standard deviations.
struct TrendPriors {
  double mu0_mean = 0.25;
  double mu0_sd = 0.5;
  double mu1_mean = 0.0;
  double mu1_sd = 0.1;
  double sigma_scale = 0.5;
};

struct McmcConfig {
  int chains = 4;
  int iterations = 10000;  // per chain, burn-in included
  int burn_in = 5000;
  std::uint64_t seed = 1;
  TrendPriors priors;
  bool use_likelihood = true;  // false samples the prior
  unsigned workers = 0;        // 0 = one thread per chain
  double rhat_flag = 1.1;
};

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double ci80_lo = 0.0, ci80_hi = 0.0;
  double ci95_lo = 0.0, ci95_hi = 0.0;
  double rhat = 1.0;  // split-chain
};

struct ConditionPosterior {
  std::string condition;
  int trials = 0;
  ParamSummary mu0;
  ParamSummary mu1;
  double p_beta1_positive = 0.0;  // share of retained mu1 draws above 0
};

struct PosteriorSummary {
  std::vector<ConditionPosterior> conditions;  // in order of first appearance
  ParamSummary sigma0, sigma1, sigma2;
  double max_rhat = 1.0;
  bool flagged = false;  // some R-hat above McmcConfig::rhat_flag
  int chains = 0;
  int iterations = 0;
  int burn_in = 0;
  int retained_draws = 0;  // over all chains
  std::vector<std::uint64_t> chain_seeds;
  std::vector<double> sigma_acceptance;  // per chain, scale moves
};

// Gibbs sampling for the trial coefficients and condition means with
// Metropolis moves for the three scales:
//   a[i,m] ~ Normal(beta0[i] + beta1[i] * m, sigma2)
//   beta0[i] ~ Normal(mu0[c(i)], sigma0), beta1[i] ~ Normal(mu1[c(i)], sigma1)
// Chains run on separate threads and are reproducible from config.seed.
// Throws std::invalid_argument for empty data or a trial with fewer than two
// movements, std::runtime_error if the likelihood turns non-finite.
PosteriorSummary fit_hierarchical(const HierarchicalData& data,
                                  const McmcConfig& config = {});

// Gelman-Rubin statistic on chains split in half. Each inner vector is one
// chain; all must have the same length >= 4.
double split_rhat(std::span<const std::vector<double>> chains);

struct SyntheticCondition {
  std::string label;
  int trials = 30;
  double mu0 = 0.25;
  double mu1 = 0.0;
};

struct SyntheticTrendSpec {
  std::vector<SyntheticCondition> conditions;
  int movements = 8;
  double sigma0 = 0.05;
  double sigma1 = 0.005;
  double sigma2 = 0.03;
  // Trials come in mirrored pairs: the partner of trial values a[m] is
  // 2 * (mu0 + mu1 * m) - a[m], so each condition's pooled trend equals its
  // generating line exactly. Needs an even trial count.
  bool antithetic = false;
};

HierarchicalData synthetic_trend_data(const SyntheticTrendSpec& spec,
                                      std::uint64_t seed);

}  // namespace proxsim

#endif  // PROXSIM_ANALYSIS_HIERARCHICAL_H_
