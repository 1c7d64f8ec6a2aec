#ifndef PROXSIM_ANALYSIS_REPORT_H_
#define PROXSIM_ANALYSIS_REPORT_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "proxsim/analysis/anova.h"
#include "proxsim/analysis/hierarchical.h"
#include "proxsim/sim/trajectory_log.h"

namespace proxsim {

// One line of metrics.csv.
struct MetricRow {
  std::string trial;  // log stem
  std::string condition;
  int task = 0;
  std::string metric;  // "a_void" or "path_length"
  double value = 0.0;
};

// a_void for every pole task with a datum and path length for every object
// task. `stems` names the logs and must match them in length.
std::vector<MetricRow> metric_rows(std::span<const TrajectoryLog> logs,
                                   std::span<const std::string> stems);

std::string metrics_csv(std::span<const MetricRow> rows);

// Per-trial means of one metric, grouped by condition. Groups follow
// `conditions`; trials without a value for the metric are skipped.
std::vector<std::vector<double>> trial_means_by_condition(
    std::span<const MetricRow> rows, const std::string& metric,
    std::span<const std::string> conditions);

std::string anova_json(std::span<const GroupSummary> groups,
                       const AnovaResult& result,
                       std::span<const PairwiseResult> pairs,
                       const PermutationConfig& permutation);

std::string posterior_json(const PosteriorSummary& summary,
                           const McmcConfig& config, int omitted_records);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace proxsim

#endif  // PROXSIM_ANALYSIS_REPORT_H_
