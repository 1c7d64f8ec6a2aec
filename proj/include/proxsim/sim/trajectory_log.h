#ifndef PROXSIM_SIM_TRAJECTORY_LOG_H_
#define PROXSIM_SIM_TRAJECTORY_LOG_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "proxsim/core/types.h"
#include "proxsim/sim/layout.h"

namespace proxsim {

inline constexpr int kRobot = 0;
inline constexpr int kParticipant = 1;

struct AgentSample {
  std::string id;
  Pose pose;
  InternalState s;
  EstimatedState estimate;  // this agent's estimate of the other

  bool operator==(const AgentSample&) const = default;
};

// One 50 ms tick. task_complete / task_capped mark the last sample of a task.
struct Sample {
  std::int64_t tick = 0;
  int task = 0;
  Target target;
  std::array<AgentSample, 2> agents;  // kRobot, kParticipant
  bool task_complete = false;
  bool task_capped = false;

  bool operator==(const Sample&) const = default;
};

struct TaskRecord {
  int index = 0;
  Target target;
  std::int64_t first_tick = 0;
  std::int64_t last_tick = 0;
  bool completed = false;
  bool capped = false;

  bool operator==(const TaskRecord&) const = default;
};

struct LogMeta {
  std::string condition;
  std::optional<double> psi_robot;  // empty for the random-walk condition
  double psi_participant = 0.0;
  std::string participant;  // preset name or "input"
  std::uint64_t seed = 0;
  FieldLayout layout;
  TaskSchedule schedule;
  double capture_radius = 0.8;
  double tick_seconds = kTickSeconds;
  double eps_v = 0.05;  // stillness threshold used by the analysis
  std::vector<TaskRecord> tasks;

  bool operator==(const LogMeta&) const = default;
};

struct TrajectoryLog {
  LogMeta meta;
  std::vector<Sample> samples;

  // Samples belonging to task k, in tick order.
  std::vector<const Sample*> task_samples(int task) const;
};

// On-disk form: <stem>.meta.json (pretty JSON header) and <stem>.jsonl (one
// compact JSON record per tick).
std::string meta_to_json(const LogMeta& meta);
std::string sample_to_json(const Sample& sample);
LogMeta meta_from_json(const std::string& text);
Sample sample_from_json(const std::string& text);

void write_log(const TrajectoryLog& log, const std::filesystem::path& dir,
               const std::string& stem);
// Throws std::runtime_error on I/O or schema errors.
TrajectoryLog read_log(const std::filesystem::path& dir,
                       const std::string& stem);

// Plot-ready trajectory table: task,tick,t,agent,x,y,heading.
void write_trajectory_csv(const TrajectoryLog& log,
                          const std::filesystem::path& path);

}  // namespace proxsim

#endif  // PROXSIM_SIM_TRAJECTORY_LOG_H_
