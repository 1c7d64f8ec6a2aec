#include "proxsim/analysis/hierarchical.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "proxsim/analysis/metrics.h"

namespace proxsim {

void HierarchicalData::validate() const {
  std::map<int, std::pair<std::string, int>> seen;  // trial -> (condition, last m)
  for (const TrendRecord& r : records) {
    auto [it, fresh] = seen.try_emplace(r.trial, r.condition, r.movement);
    if (fresh) continue;
    if (it->second.first != r.condition) {
      throw std::invalid_argument("trial " + std::to_string(r.trial) +
                                  " maps to more than one condition");
    }
    if (r.movement <= it->second.second) {
      throw std::invalid_argument("movement indices of trial " +
                                  std::to_string(r.trial) +
                                  " are not strictly increasing");
    }
    it->second.second = r.movement;
  }
}

HierarchicalData avoidance_trend_table(std::span<const TrajectoryLog> logs) {
  HierarchicalData data;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const TrajectoryLog& log = logs[i];
    int m = 0;
    for (std::size_t k = 0; k < log.meta.schedule.entries.size(); ++k) {
      if (!log.meta.schedule.entries[k].is_pole()) continue;
      ++m;
      const auto av = compute_avoidance(log, static_cast<int>(k));
      if (!av) {
        ++data.omitted;
        continue;
      }
      data.records.push_back({static_cast<int>(i), m, log.meta.condition, av->a_void});
    }
  }
  return data;
}

double split_rhat(std::span<const std::vector<double>> chains) {
  if (chains.empty()) throw std::invalid_argument("no chains");
  const std::size_t len = chains.front().size();
  if (len < 4) throw std::invalid_argument("chains too short for split R-hat");
  for (const auto& c : chains) {
    if (c.size() != len) throw std::invalid_argument("chains differ in length");
  }
  const std::size_t half = len / 2;
  std::vector<double> means, vars;
  for (const auto& c : chains) {
    for (std::size_t start : {std::size_t{0}, len - half}) {
      double mean = 0.0;
      for (std::size_t t = 0; t < half; ++t) mean += c[start + t];
      mean /= half;
      double ss = 0.0;
      for (std::size_t t = 0; t < half; ++t) {
        ss += (c[start + t] - mean) * (c[start + t] - mean);
      }
      means.push_back(mean);
      vars.push_back(ss / (half - 1));
    }
  }
  const double m = static_cast<double>(means.size());
  const double n = static_cast<double>(half);
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double b = 0.0;
  for (double v : means) b += (v - grand) * (v - grand);
  b *= n / (m - 1);
  const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
  if (w <= 0.0) return b <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double var_plus = (n - 1) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

namespace {

struct Trial {
  int condition = 0;
  double n = 0, sm = 0, smm = 0, sa = 0, sma = 0, saa = 0;

  double sse(double b0, double b1) const {
    return saa - 2 * b0 * sa - 2 * b1 * sma + b0 * b0 * n + 2 * b0 * b1 * sm +
           b1 * b1 * smm;
  }
};

struct Prepared {
  std::vector<std::string> labels;
  std::vector<Trial> trials;
  std::vector<int> trials_per_condition;
  double n_obs = 0;
};

Prepared prepare(const HierarchicalData& data) {
  if (data.records.empty()) throw std::invalid_argument("no observations");
  data.validate();
  Prepared p;
  std::map<int, std::size_t> trial_index;
  for (const TrendRecord& r : data.records) {
    if (!std::isfinite(r.value)) {
      throw std::runtime_error("non-finite likelihood: trial " + std::to_string(r.trial) +
                               " movement " + std::to_string(r.movement) +
                               " has a non-finite value");
    }
    auto cit = std::find(p.labels.begin(), p.labels.end(), r.condition);
    const int c = static_cast<int>(cit - p.labels.begin());
    if (cit == p.labels.end()) {
      p.labels.push_back(r.condition);
      p.trials_per_condition.push_back(0);
    }
    auto [it, fresh] = trial_index.try_emplace(r.trial, p.trials.size());
    if (fresh) {
      p.trials.push_back({});
      p.trials.back().condition = c;
      ++p.trials_per_condition[c];
    }
    Trial& t = p.trials[it->second];
    const double m = r.movement, a = r.value;
    t.n += 1;
    t.sm += m;
    t.smm += m * m;
    t.sa += a;
    t.sma += m * a;
    t.saa += a * a;
  }
  for (const Trial& t : p.trials) {
    if (t.n < 2) throw std::invalid_argument("every trial needs at least two movements");
  }
  p.n_obs = static_cast<double>(data.records.size());
  return p;
}

// Retained draws of one chain, one vector per tracked quantity:
// mu0[c], mu1[c] for every condition, then sigma0, sigma1, sigma2.
struct ChainDraws {
  std::vector<std::vector<double>> series;
  long sigma_accepted = 0;
  long sigma_proposed = 0;
};

class Chain {
 public:
  Chain(const Prepared& p, const McmcConfig& cfg, std::uint64_t seed)
      : p_(p), cfg_(cfg), pr_(cfg.priors), rng_(seed) {
    const std::size_t nc = p.labels.size();
    mu0_.resize(nc);
    mu1_.resize(nc);
    // Dispersed starting points drawn from the priors.
    for (std::size_t c = 0; c < nc; ++c) {
      mu0_[c] = pr_.mu0_mean + pr_.mu0_sd * normal_(rng_) * 0.5;
      mu1_[c] = pr_.mu1_mean + pr_.mu1_sd * normal_(rng_) * 0.5;
    }
    for (double* s : {&sigma0_, &sigma1_, &sigma2_}) {
      *s = std::max(0.01, std::abs(pr_.sigma_scale * normal_(rng_)));
    }
    b0_.resize(p.trials.size());
    b1_.resize(p.trials.size());
    for (std::size_t i = 0; i < p.trials.size(); ++i) {
      b0_[i] = mu0_[p.trials[i].condition];
      b1_[i] = mu1_[p.trials[i].condition];
    }
  }

  ChainDraws run() {
    ChainDraws out;
    const std::size_t nc = p_.labels.size();
    out.series.assign(2 * nc + 3, {});
    for (auto& s : out.series) s.reserve(cfg_.iterations - cfg_.burn_in);
    for (int it = 0; it < cfg_.iterations; ++it) {
      const bool warm = it < cfg_.burn_in;
      gibbs_coefficients();
      gibbs_means();
      for (int k = 0; k < 3; ++k) scale_move(k, warm, out);
      noncentered_move(0, warm);
      noncentered_move(1, warm);
      if (!std::isfinite(log_likelihood())) {
        throw std::runtime_error("likelihood became non-finite at iteration " +
                                 std::to_string(it));
      }
      if (warm) continue;
      for (std::size_t c = 0; c < nc; ++c) {
        out.series[c].push_back(mu0_[c]);
        out.series[nc + c].push_back(mu1_[c]);
      }
      out.series[2 * nc].push_back(sigma0_);
      out.series[2 * nc + 1].push_back(sigma1_);
      out.series[2 * nc + 2].push_back(sigma2_);
    }
    return out;
  }

 private:
  double log_likelihood() const {
    if (!cfg_.use_likelihood) return 0.0;
    double sse = 0.0;
    for (std::size_t i = 0; i < p_.trials.size(); ++i) sse += p_.trials[i].sse(b0_[i], b1_[i]);
    return -p_.n_obs * std::log(sigma2_) - 0.5 * sse / (sigma2_ * sigma2_);
  }

  void gibbs_coefficients() {
    const double q0 = 1.0 / (sigma0_ * sigma0_);
    const double q1 = 1.0 / (sigma1_ * sigma1_);
    const double ql = cfg_.use_likelihood ? 1.0 / (sigma2_ * sigma2_) : 0.0;
    for (std::size_t i = 0; i < p_.trials.size(); ++i) {
      const Trial& t = p_.trials[i];
      const int c = t.condition;
      // Posterior precision [[p00, p01], [p01, p11]] and linear term.
      const double p00 = q0 + ql * t.n;
      const double p01 = ql * t.sm;
      const double p11 = q1 + ql * t.smm;
      const double h0 = q0 * mu0_[c] + ql * t.sa;
      const double h1 = q1 * mu1_[c] + ql * t.sma;
      const double det = p00 * p11 - p01 * p01;
      const double m0 = (p11 * h0 - p01 * h1) / det;
      const double m1 = (p00 * h1 - p01 * h0) / det;
      // Cholesky of the precision; x = mean + L^-T z.
      const double l00 = std::sqrt(p00);
      const double l10 = p01 / l00;
      const double l11 = std::sqrt(p11 - l10 * l10);
      const double z0 = normal_(rng_), z1 = normal_(rng_);
      const double x1 = z1 / l11;
      const double x0 = (z0 - l10 * x1) / l00;
      b0_[i] = m0 + x0;
      b1_[i] = m1 + x1;
    }
  }

  void gibbs_means() {
    const std::size_t nc = p_.labels.size();
    std::vector<double> s0(nc, 0.0), s1(nc, 0.0);
    for (std::size_t i = 0; i < p_.trials.size(); ++i) {
      s0[p_.trials[i].condition] += b0_[i];
      s1[p_.trials[i].condition] += b1_[i];
    }
    for (std::size_t c = 0; c < nc; ++c) {
      const double n = p_.trials_per_condition[c];
      mu0_[c] = draw_mean(pr_.mu0_mean, pr_.mu0_sd, s0[c], n, sigma0_);
      mu1_[c] = draw_mean(pr_.mu1_mean, pr_.mu1_sd, s1[c], n, sigma1_);
    }
  }

  double draw_mean(double prior_mean, double prior_sd, double sum, double n,
                   double sigma) {
    const double prec = 1.0 / (prior_sd * prior_sd) + n / (sigma * sigma);
    const double mean =
        (prior_mean / (prior_sd * prior_sd) + sum / (sigma * sigma)) / prec;
    return mean + normal_(rng_) / std::sqrt(prec);
  }

  double log_prior_scale(double s) const {
    return -0.5 * s * s / (pr_.sigma_scale * pr_.sigma_scale);
  }

  // Log density of the coefficient block k (0: intercepts, 1: slopes) given
  // its scale, up to a constant.
  double log_group(int k, double sigma) const {
    double ss = 0.0;
    for (std::size_t i = 0; i < p_.trials.size(); ++i) {
      const int c = p_.trials[i].condition;
      const double d = k == 0 ? b0_[i] - mu0_[c] : b1_[i] - mu1_[c];
      ss += d * d;
    }
    return -static_cast<double>(p_.trials.size()) * std::log(sigma) -
           0.5 * ss / (sigma * sigma);
  }

  double log_conditional(int k, double sigma) const {
    if (k < 2) return log_group(k, sigma) + log_prior_scale(sigma);
    if (!cfg_.use_likelihood) return log_prior_scale(sigma);
    double sse = 0.0;
    for (std::size_t i = 0; i < p_.trials.size(); ++i) sse += p_.trials[i].sse(b0_[i], b1_[i]);
    return -p_.n_obs * std::log(sigma) - 0.5 * sse / (sigma * sigma) +
           log_prior_scale(sigma);
  }

  // Nudges a proposal scale toward 44% acceptance.
  static double adapt(double step, bool accepted) {
    return std::clamp(step * std::exp(0.02 * ((accepted ? 1.0 : 0.0) - 0.44)), 1e-3, 5.0);
  }

  double& scale(int k) { return k == 0 ? sigma0_ : k == 1 ? sigma1_ : sigma2_; }

  // Random-walk Metropolis on log sigma; the step adapts during burn-in only.
  void scale_move(int k, bool warm, ChainDraws& out) {
    double& s = scale(k);
    const double u = step_[k] * normal_(rng_);
    const double proposal = s * std::exp(u);
    const double log_ratio = log_conditional(k, proposal) - log_conditional(k, s) + u;
    const bool accept = std::log(uniform_(rng_)) < log_ratio;
    if (accept) s = proposal;
    if (!warm) {
      ++out.sigma_proposed;
      out.sigma_accepted += accept;
    } else {
      step_[k] = adapt(step_[k], accept);
    }
  }

  // Rescales sigma together with the deviations of its coefficient block
  // around the condition means, which moves along the funnel of the
  // hierarchical prior.
  void noncentered_move(int k, bool warm) {
    double& s = scale(k);
    std::vector<double>& b = k == 0 ? b0_ : b1_;
    const std::vector<double>& mu = k == 0 ? mu0_ : mu1_;
    const double u = nc_step_[k] * normal_(rng_);
    const double lambda = std::exp(u);
    const double before = log_likelihood();
    std::vector<double> saved = b;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double m = mu[p_.trials[i].condition];
      b[i] = m + lambda * (b[i] - m);
    }
    const double proposal = s * lambda;
    const double log_ratio = log_likelihood() - before + log_prior_scale(proposal) -
                             log_prior_scale(s) + u;
    const bool accept = std::log(uniform_(rng_)) < log_ratio;
    if (accept) {
      s = proposal;
    } else {
      b = std::move(saved);
    }
    if (warm) {
      nc_step_[k] = adapt(nc_step_[k], accept);
    }
  }

  const Prepared& p_;
  const McmcConfig& cfg_;
  const TrendPriors& pr_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::vector<double> b0_, b1_, mu0_, mu1_;
  double sigma0_ = 0.1, sigma1_ = 0.1, sigma2_ = 0.1;
  double step_[3] = {0.3, 0.3, 0.3};
  double nc_step_[2] = {0.3, 0.3};
};

double quantile(std::vector<double> sorted_copy, double q) {
  const double pos = q * (sorted_copy.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_copy.size() - 1);
  return sorted_copy[lo] + (pos - lo) * (sorted_copy[hi] - sorted_copy[lo]);
}

ParamSummary summarize_param(std::string name,
                             const std::vector<std::vector<double>>& chains) {
  ParamSummary s;
  s.name = std::move(name);
  std::vector<double> all;
  for (const auto& c : chains) all.insert(all.end(), c.begin(), c.end());
  const double n = static_cast<double>(all.size());
  s.mean = std::accumulate(all.begin(), all.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : all) ss += (v - s.mean) * (v - s.mean);
  s.sd = all.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  std::sort(all.begin(), all.end());
  s.ci95_lo = quantile(all, 0.025);
  s.ci80_lo = quantile(all, 0.10);
  s.ci80_hi = quantile(all, 0.90);
  s.ci95_hi = quantile(all, 0.975);
  s.rhat = chains.front().size() >= 4 ? split_rhat(chains) : 1.0;
  return s;
}

}  // namespace

PosteriorSummary fit_hierarchical(const HierarchicalData& data,
                                  const McmcConfig& config) {
  if (config.chains < 1) throw std::invalid_argument("need at least one chain");
  if (config.burn_in < 0 || config.iterations <= config.burn_in) {
    throw std::invalid_argument("iterations must exceed burn-in");
  }
  const Prepared prepared = prepare(data);

  PosteriorSummary out;
  out.chains = config.chains;
  out.iterations = config.iterations;
  out.burn_in = config.burn_in;
  out.retained_draws = config.chains * (config.iterations - config.burn_in);
  for (int c = 0; c < config.chains; ++c) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(c), 0xb7e1u};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    out.chain_seeds.push_back((static_cast<std::uint64_t>(words[0]) << 32) | words[1]);
  }

  std::vector<ChainDraws> draws(config.chains);
  unsigned workers = config.workers == 0 ? static_cast<unsigned>(config.chains)
                                         : config.workers;
  workers = std::max(1u, std::min<unsigned>(workers, config.chains));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int c = next++; c < config.chains; c = next++) {
      draws[c] = Chain(prepared, config, out.chain_seeds[c]).run();
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned w = 1; w < workers; ++w) pool.push_back(std::async(std::launch::async, work));
  work();
  for (auto& f : pool) f.get();

  const std::size_t nc = prepared.labels.size();
  auto gather = [&](std::size_t k) {
    std::vector<std::vector<double>> chains;
    for (const ChainDraws& d : draws) chains.push_back(d.series[k]);
    return chains;
  };
  for (std::size_t c = 0; c < nc; ++c) {
    ConditionPosterior cp;
    cp.condition = prepared.labels[c];
    cp.trials = prepared.trials_per_condition[c];
    cp.mu0 = summarize_param("mu0[" + cp.condition + "]", gather(c));
    const auto mu1 = gather(nc + c);
    cp.mu1 = summarize_param("mu1[" + cp.condition + "]", mu1);
    long positive = 0, total = 0;
    for (const auto& chain : mu1) {
      for (double v : chain) positive += v > 0.0;
      total += static_cast<long>(chain.size());
    }
    cp.p_beta1_positive = static_cast<double>(positive) / total;
    out.conditions.push_back(std::move(cp));
  }
  out.sigma0 = summarize_param("sigma0", gather(2 * nc));
  out.sigma1 = summarize_param("sigma1", gather(2 * nc + 1));
  out.sigma2 = summarize_param("sigma2", gather(2 * nc + 2));

  out.max_rhat = std::max({out.sigma0.rhat, out.sigma1.rhat, out.sigma2.rhat});
  for (const ConditionPosterior& cp : out.conditions) {
    out.max_rhat = std::max({out.max_rhat, cp.mu0.rhat, cp.mu1.rhat});
  }
  out.flagged = !(out.max_rhat <= config.rhat_flag);
  for (const ChainDraws& d : draws) {
    out.sigma_acceptance.push_back(
        d.sigma_proposed ? static_cast<double>(d.sigma_accepted) / d.sigma_proposed : 0.0);
  }
  return out;
}

HierarchicalData synthetic_trend_data(const SyntheticTrendSpec& spec,
                                      std::uint64_t seed) {
  if (spec.movements < 2) throw std::invalid_argument("need at least two movements");
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x5e7u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  HierarchicalData data;
  int trial = 0;
  for (const SyntheticCondition& c : spec.conditions) {
    if (spec.antithetic && c.trials % 2 != 0) {
      throw std::invalid_argument("antithetic generation needs an even trial count");
    }
    const int draws = spec.antithetic ? c.trials / 2 : c.trials;
    for (int k = 0; k < draws; ++k) {
      const double b0 = c.mu0 + spec.sigma0 * normal(rng);
      const double b1 = c.mu1 + spec.sigma1 * normal(rng);
      std::vector<double> values(spec.movements);
      for (int m = 1; m <= spec.movements; ++m) {
        values[m - 1] = b0 + b1 * m + spec.sigma2 * normal(rng);
      }
      for (int m = 1; m <= spec.movements; ++m) {
        data.records.push_back({trial, m, c.label, values[m - 1]});
      }
      ++trial;
      if (!spec.antithetic) continue;
      for (int m = 1; m <= spec.movements; ++m) {
        const double line = c.mu0 + c.mu1 * m;
        data.records.push_back({trial, m, c.label, 2.0 * line - values[m - 1]});
      }
      ++trial;
    }
  }
  return data;
}

}  // namespace proxsim
