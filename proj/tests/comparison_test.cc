#include <gtest/gtest.h>

#include "proxsim/analysis/anova.h"
#include "proxsim/analysis/report.h"
#include "proxsim/sim/trial.h"

namespace proxsim {
namespace {

// Pairwise a_void comparisons of a 20-trial rejecting-participant experiment.
class SimulatedComparisons : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const ExperimentResult runs = run_experiment(TrialConfig{}, 20, 100);
    std::vector<std::string> stems, names;
    for (const ManifestEntry& e : runs.manifest) stems.push_back(e.stem);
    for (Condition c : kAllConditions) names.push_back(condition_name(c));
    const auto groups =
        trial_means_by_condition(metric_rows(runs.logs, stems), "a_void", names);
    pairs_ = new std::vector<PairwiseResult>(pairwise_comparisons(names, groups, {10000, 1}));
  }
  static void TearDownTestSuite() { delete pairs_; }

  static const PairwiseResult& pair(const std::string& a, const std::string& b) {
    for (const PairwiseResult& p : *pairs_) {
      if (p.a == a && p.b == b) return p;
    }
    throw std::logic_error("no pair " + a + " vs " + b);
  }

  static std::vector<PairwiseResult>* pairs_;
};

std::vector<PairwiseResult>* SimulatedComparisons::pairs_ = nullptr;

TEST_F(SimulatedComparisons, LowestGainSeparatesFromMiddleGain) {
  const PairwiseResult& p = pair("psi_0.001", "psi_0.005");
  EXPECT_GT(p.mean_diff, 0.0);
  EXPECT_LT(p.p_adjusted.value(), 0.05);
}

TEST_F(SimulatedComparisons, MiddleAndHighGainNotSeparated) {
  const PairwiseResult& p = pair("psi_0.005", "psi_0.01");
  EXPECT_GE(p.p_adjusted.value(), 0.05) << "mean difference " << p.mean_diff;
}

}  // namespace
}  // namespace proxsim
