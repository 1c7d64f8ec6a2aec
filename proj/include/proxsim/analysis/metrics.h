#ifndef PROXSIM_ANALYSIS_METRICS_H_
#define PROXSIM_ANALYSIS_METRICS_H_

#include <optional>
#include <span>
#include <vector>

#include "proxsim/core/geometry.h"
#include "proxsim/sim/trajectory_log.h"

namespace proxsim {

// Per-task avoidance series: |sin alpha_t| for each qualifying tick, where
// alpha_t is the angle between the participant's movement over the tick and
// the direction from the participant to the target.
struct AvoidanceSeries {
  std::vector<double> gaps;
  double a_void = 0.0;  // mean of gaps
  int n = 0;            // gaps.size()
};

// Avoidance of a path towards a fixed target. Ticks whose displacement is
// below min_step are skipped; returns nullopt if none qualifies.
std::optional<AvoidanceSeries> avoidance_of_path(std::span<const Vec2> path,
                                                 const Vec2& target,
                                                 double min_step);

// a_void of task k of a log. nullopt for object tasks or when the
// participant never moved faster than the log's eps_v.
std::optional<AvoidanceSeries> compute_avoidance(const TrajectoryLog& log,
                                                 int task);

double path_length(std::span<const Vec2> path);

// Participant distance travelled during task k.
double compute_path_length(const TrajectoryLog& log, int task);

// Participant positions of task k in tick order.
std::vector<Vec2> participant_path(const TrajectoryLog& log, int task);

}  // namespace proxsim

#endif  // PROXSIM_ANALYSIS_METRICS_H_
