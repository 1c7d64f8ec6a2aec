#include "proxsim/analysis/report.h"

#include <fstream>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "proxsim/analysis/metrics.h"

namespace proxsim {

using nlohmann::ordered_json;

std::vector<MetricRow> metric_rows(std::span<const TrajectoryLog> logs,
                                   std::span<const std::string> stems) {
  if (logs.size() != stems.size()) {
    throw std::invalid_argument("one stem per log required");
  }
  std::vector<MetricRow> rows;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const TrajectoryLog& log = logs[i];
    const auto& entries = log.meta.schedule.entries;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const int task = static_cast<int>(k);
      if (entries[k].is_pole()) {
        if (const auto av = compute_avoidance(log, task)) {
          rows.push_back({stems[i], log.meta.condition, task, "a_void", av->a_void});
        }
      } else {
        rows.push_back({stems[i], log.meta.condition, task, "path_length",
                        compute_path_length(log, task)});
      }
    }
  }
  return rows;
}

std::string metrics_csv(std::span<const MetricRow> rows) {
  std::ostringstream out;
  out.precision(17);
  out << "trial,condition,task,metric,value\n";
  for (const MetricRow& r : rows) {
    out << r.trial << ',' << r.condition << ',' << r.task << ',' << r.metric
        << ',' << r.value << '\n';
  }
  return out.str();
}

std::vector<std::vector<double>> trial_means_by_condition(
    std::span<const MetricRow> rows, const std::string& metric,
    std::span<const std::string> conditions) {
  // Trials keep their order of first appearance.
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::string, std::pair<double, int>>> acc;
  for (const MetricRow& r : rows) {
    if (r.metric != metric) continue;
    auto [it, fresh] = acc.try_emplace(r.trial, r.condition, std::pair{0.0, 0});
    if (fresh) order.push_back(r.trial);
    it->second.second.first += r.value;
    it->second.second.second += 1;
  }
  std::vector<std::vector<double>> groups(conditions.size());
  for (const std::string& trial : order) {
    const auto& [condition, sum] = acc.at(trial);
    for (std::size_t c = 0; c < conditions.size(); ++c) {
      if (conditions[c] == condition) groups[c].push_back(sum.first / sum.second);
    }
  }
  return groups;
}

namespace {

ordered_json param_json(const ParamSummary& p) {
  return {{"mean", p.mean},
          {"sd", p.sd},
          {"ci80", {p.ci80_lo, p.ci80_hi}},
          {"ci95", {p.ci95_lo, p.ci95_hi}},
          {"rhat", p.rhat}};
}

ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

}  // namespace

std::string anova_json(std::span<const GroupSummary> groups,
                       const AnovaResult& result,
                       std::span<const PairwiseResult> pairs,
                       const PermutationConfig& permutation) {
  ordered_json j;
  ordered_json g = ordered_json::array();
  for (const GroupSummary& s : groups) {
    g.push_back({{"label", s.label}, {"n", s.n}, {"mean", s.mean}, {"sd", s.sd}});
  }
  j["groups"] = g;
  j["F"] = number_or_null(result.F);
  j["df_between"] = result.df_between;
  j["df_within"] = result.df_within;
  j["p"] = result.p;
  j["cohens_f"] = number_or_null(result.cohens_f);
  ordered_json pj = ordered_json::array();
  for (const PairwiseResult& p : pairs) {
    pj.push_back({{"a", p.a},
                  {"b", p.b},
                  {"mean_diff", p.mean_diff},
                  {"p", p.p ? ordered_json(*p.p) : ordered_json(nullptr)},
                  {"p_holm", p.p_adjusted ? ordered_json(*p.p_adjusted)
                                          : ordered_json(nullptr)}});
  }
  j["pairwise"] = {{"method", "permutation, Holm-adjusted"},
                   {"permutations", permutation.permutations},
                   {"seed", permutation.seed},
                   {"pairs", pj}};
  return j.dump(2);
}

std::string posterior_json(const PosteriorSummary& summary,
                           const McmcConfig& config, int omitted_records) {
  ordered_json j;
  ordered_json conds = ordered_json::array();
  for (const ConditionPosterior& c : summary.conditions) {
    conds.push_back({{"condition", c.condition},
                     {"trials", c.trials},
                     {"mu0", param_json(c.mu0)},
                     {"mu1", param_json(c.mu1)},
                     {"p_beta1_positive", c.p_beta1_positive}});
  }
  j["conditions"] = conds;
  j["sigma0"] = param_json(summary.sigma0);
  j["sigma1"] = param_json(summary.sigma1);
  j["sigma2"] = param_json(summary.sigma2);
  j["max_rhat"] = summary.max_rhat;
  j["rhat_flagged"] = summary.flagged;
  j["sampler"] = {{"chains", summary.chains},
                  {"iterations", summary.iterations},
                  {"burn_in", summary.burn_in},
                  {"retained_draws", summary.retained_draws},
                  {"seed", config.seed},
                  {"chain_seeds", summary.chain_seeds},
                  {"scale_acceptance", summary.sigma_acceptance}};
  j["priors"] = {{"mu0", {{"mean", config.priors.mu0_mean}, {"sd", config.priors.mu0_sd}}},
                 {"mu1", {{"mean", config.priors.mu1_mean}, {"sd", config.priors.mu1_sd}}},
                 {"sigma_half_normal_scale", config.priors.sigma_scale}};
  j["omitted_records"] = omitted_records;
  return j.dump(2);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

}  // namespace proxsim
