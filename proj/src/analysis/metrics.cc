#include "proxsim/analysis/metrics.h"

#include <algorithm>
#include <cmath>

namespace proxsim {

std::optional<AvoidanceSeries> avoidance_of_path(std::span<const Vec2> path,
                                                 const Vec2& target,
                                                 double min_step) {
  AvoidanceSeries out;
  for (std::size_t t = 1; t < path.size(); ++t) {
    const Vec2 move = path[t] - path[t - 1];
    const Vec2 to_target = target - path[t - 1];
    const double m = move.norm();
    const double g = to_target.norm();
    if (m < min_step || g == 0.0) continue;
    out.gaps.push_back(std::min(1.0, std::abs(move.cross(to_target)) / (m * g)));
  }
  if (out.gaps.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : out.gaps) sum += v;
  out.n = static_cast<int>(out.gaps.size());
  out.a_void = sum / out.n;
  return out;
}

std::vector<Vec2> participant_path(const TrajectoryLog& log, int task) {
  std::vector<Vec2> path;
  for (const Sample* s : log.task_samples(task)) {
    path.push_back(s->agents[kParticipant].pose.position);
  }
  return path;
}

std::optional<AvoidanceSeries> compute_avoidance(const TrajectoryLog& log,
                                                 int task) {
  if (task < 0 || task >= static_cast<int>(log.meta.schedule.entries.size())) {
    return std::nullopt;
  }
  const Target& target = log.meta.schedule.entries[task];
  if (!target.is_pole()) return std::nullopt;
  const std::vector<Vec2> path = participant_path(log, task);
  return avoidance_of_path(path, log.meta.layout.poles[target.pole],
                           log.meta.eps_v * log.meta.tick_seconds);
}

double path_length(std::span<const Vec2> path) {
  double total = 0.0;
  for (std::size_t t = 1; t < path.size(); ++t) total += (path[t] - path[t - 1]).norm();
  return total;
}

double compute_path_length(const TrajectoryLog& log, int task) {
  return path_length(participant_path(log, task));
}

}  // namespace proxsim
