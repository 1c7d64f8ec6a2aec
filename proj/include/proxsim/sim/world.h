#ifndef PROXSIM_SIM_WORLD_H_
#define PROXSIM_SIM_WORLD_H_

#include <array>
#include <cstdint>
#include <deque>
#include <random>
#include <string>

#include "proxsim/core/types.h"
#include "proxsim/sim/layout.h"
#include "proxsim/sim/trajectory_log.h"

namespace proxsim {

enum class Policy {
  kModel,       // estimate -> update -> behavior field
  kGoalSeek,    // scripted participant: goal attraction blended with field
  kRandomWalk,  // control condition robot
  kInput,       // participant steered by a remote human
  kStationary,  // stays where it is (practice runs)
};

struct AgentSpec {
  std::string id;
  Policy policy = Policy::kModel;
  BehaviorParams phi;
  BehaviorParams phi_hat;  // what this agent assumes about the other
  CognitiveParams cog;
  InternalState s0;
  Pose start_pose;
  double social_weight = 1.0;  // GoalSeek blend weight of the social field
};

struct WorldConfig {
  FieldLayout layout = FieldLayout::standard();
  TaskSchedule schedule;
  AgentSpec robot;
  AgentSpec participant;
  double capture_radius = 0.8;
  double task_cap_seconds = 40.0;
  int task_count = kTasksPerTrial;  // the run ends after this many tasks
  double rw_heading_sd = 0.3;      // rad per tick
  double rw_speed_fraction = 0.8;  // of v_max
  std::uint64_t seed = 0;
  LogMeta meta;  // descriptive fields copied into the log header
};

struct AgentRuntime {
  Pose pose;
  InternalState s;
  EstimatedState estimate;
  std::deque<Pose> other_history;  // the other's last window + 1 poses
};

// Two-agent world advancing in 50 ms ticks through the ten-task protocol.
// Single owner; step() is the only mutator besides set_input().
class World {
 public:
  explicit World(WorldConfig config);

  // Advances one tick and appends one sample to the log. The tick after a
  // task ends is a reset tick: the robot returns to its home pose and s0,
  // nobody else moves, and the sample opens the next task.
  void step();
  bool done() const { return done_; }

  // Desired velocity for a kInput participant, as a fraction of v_max per
  // axis; the norm is capped at 1.
  void set_input(const Vec2& move);

  std::int64_t tick() const { return tick_; }
  int task() const { return task_; }
  const Target& current_target() const;
  Vec2 target_position() const;
  const AgentRuntime& agent(int index) const { return agents_[index]; }
  const WorldConfig& config() const { return config_; }
  const TrajectoryLog& log() const { return log_; }
  TrajectoryLog take_log() { return std::move(log_); }

 private:
  const AgentSpec& spec(int index) const;
  void perceive(int index);
  MotionCommand goal_seek_command(int index) const;
  MotionCommand input_command(int index) const;
  Pose random_walk_step(int index);
  void reset_robot();
  void record(bool complete, bool capped);

  WorldConfig config_;
  std::array<AgentRuntime, 2> agents_;
  std::mt19937_64 rng_;
  Vec2 input_move_;
  std::int64_t tick_ = 0;
  std::int64_t task_start_tick_ = 0;
  int task_ = 0;
  bool reset_pending_ = false;
  bool done_ = false;
  TrajectoryLog log_;
};

// Where a scripted or human participant starts: on the pole diametrically
// opposite the first pole target, facing the field center.
Pose participant_start_pose(const FieldLayout& layout,
                            const TaskSchedule& schedule);

}  // namespace proxsim

#endif  // PROXSIM_SIM_WORLD_H_
