#include "proxsim/sim/world.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "proxsim/core/behavior.h"
#include "proxsim/core/dynamics.h"
#include "proxsim/core/estimator.h"

namespace proxsim {
namespace {

MotionCommand steer_along(const Pose& pose, double move_bearing, double speed,
                          const BehaviorParams& phi) {
  MotionCommand cmd;
  cmd.speed = speed;
  cmd.move_bearing = move_bearing;
  if (speed > 0) {
    cmd.turn_rate =
        std::clamp(wrap_angle(move_bearing - pose.heading) / kTickSeconds,
                   -phi.omega_max, phi.omega_max);
  }
  return cmd;
}

bool estimates(Policy p) { return p == Policy::kModel || p == Policy::kGoalSeek; }

}  // namespace

Pose participant_start_pose(const FieldLayout& layout,
                            const TaskSchedule& schedule) {
  int first_pole = 0;
  for (const Target& t : schedule.entries) {
    if (t.is_pole()) {
      first_pole = t.pole;
      break;
    }
  }
  int start = first_pole;
  double widest = -1.0;
  const Vec2 ref = layout.poles[first_pole] - layout.robot_home;
  for (int j : layout.opposite_poles(first_pole)) {
    const Vec2 v = layout.poles[j] - layout.robot_home;
    const double angle = std::atan2(std::abs(ref.cross(v)), ref.dot(v));
    if (angle > widest) {
      widest = angle;
      start = j;
    }
  }
  Pose pose;
  pose.position = layout.poles[start];
  pose.heading = bearing(pose.position, layout.robot_home);
  return pose;
}

World::World(WorldConfig config) : config_(std::move(config)) {
  config_.layout.validate();
  config_.schedule.validate(config_.layout);
  if (config_.task_count < 1 ||
      config_.task_count > static_cast<int>(config_.schedule.entries.size())) {
    throw std::invalid_argument("task_count outside the schedule");
  }
  for (const AgentSpec* s : {&config_.robot, &config_.participant}) {
    s->phi.validate();
    s->phi_hat.validate();
    s->cog.validate();
  }
  std::seed_seq seq{static_cast<std::uint32_t>(config_.seed),
                    static_cast<std::uint32_t>(config_.seed >> 32), 0x7a1cu};
  rng_.seed(seq);

  agents_[kRobot].pose = config_.robot.start_pose;
  agents_[kRobot].s = config_.robot.s0;
  agents_[kParticipant].pose = config_.participant.start_pose;
  agents_[kParticipant].s = config_.participant.s0;
  for (int i : {kRobot, kParticipant}) {
    agents_[i].other_history.push_back(agents_[1 - i].pose);
  }

  log_.meta = config_.meta;
  log_.meta.layout = config_.layout;
  log_.meta.schedule = config_.schedule;
  log_.meta.seed = config_.seed;
  log_.meta.capture_radius = config_.capture_radius;
  log_.meta.tick_seconds = kTickSeconds;
  log_.meta.eps_v = config_.participant.cog.eps_v;
  log_.meta.tasks.clear();
  log_.meta.tasks.push_back({0, config_.schedule.entries[0], 0, 0, false, false});
  record(false, false);
}

const AgentSpec& World::spec(int index) const {
  return index == kRobot ? config_.robot : config_.participant;
}

const Target& World::current_target() const {
  return config_.schedule.entries[task_];
}

Vec2 World::target_position() const {
  const Target& t = current_target();
  return t.is_pole() ? config_.layout.poles[t.pole] : agents_[kRobot].pose.position;
}

void World::set_input(const Vec2& move) {
  Vec2 m{std::clamp(move.x, -1.0, 1.0), std::clamp(move.y, -1.0, 1.0)};
  const double n = m.norm();
  if (n > 1.0) m = m * (1.0 / n);
  input_move_ = m;
}

void World::perceive(int index) {
  AgentRuntime& self = agents_[index];
  const AgentSpec& s = spec(index);
  const auto& history = self.other_history;
  EstimatedState est = self.estimate;
  est.informative = false;
  if (static_cast<int>(history.size()) == s.cog.window + 1) {
    const Observation obs =
        observe(self.pose, history.front(), history.back(), s.cog.window);
    est = estimate_internal(obs, s.phi_hat, s.cog, self.estimate);
  }
  self.s = update_internal(self.s, est, s.cog);
  self.estimate = est;
}

MotionCommand World::goal_seek_command(int index) const {
  const AgentRuntime& self = agents_[index];
  const AgentRuntime& other = agents_[1 - index];
  const AgentSpec& s = spec(index);
  const Vec2 goal = target_position();
  Vec2 to_goal = goal - self.pose.position;
  const double goal_dist = to_goal.norm();
  if (goal_dist > 0) to_goal = to_goal * (1.0 / goal_dist);

  Vec2 desired = to_goal;
  // On a pole task the other agent only deflects the walk: the repulsive
  // part of the drive is kept and attraction is dropped. The object target
  // is held by the other agent, so there the goal term alone applies.
  if (current_target().is_pole()) {
    const RelationalState x = relational_state(self.pose, other.pose);
    if (x.r > 0) {
      const double drive = std::min(0.0, field_drive(x, self.s, s.phi));
      const Vec2 to_other =
          unit_from_angle(bearing(self.pose.position, other.pose.position));
      desired += to_other * (s.social_weight * drive);
    }
  }
  double n = desired.norm();
  if (n == 0.0) {
    desired = {-to_goal.y, to_goal.x};
    n = desired.norm();
  }
  if (n == 0.0) return {};
  return steer_along(self.pose, std::atan2(desired.y, desired.x), s.phi.v_max,
                     s.phi);
}

MotionCommand World::input_command(int index) const {
  const AgentRuntime& self = agents_[index];
  const double n = input_move_.norm();
  if (n == 0.0) return {0.0, 0.0, self.pose.heading};
  const BehaviorParams& phi = spec(index).phi;
  return steer_along(self.pose, std::atan2(input_move_.y, input_move_.x),
                     n * phi.v_max, phi);
}

Pose World::random_walk_step(int index) {
  const AgentRuntime& self = agents_[index];
  const BehaviorParams& phi = spec(index).phi;
  std::normal_distribution<double> noise(0.0, config_.rw_heading_sd);
  Pose next = self.pose;
  next.heading = wrap_angle(next.heading + noise(rng_));
  next.position +=
      unit_from_angle(next.heading) * (config_.rw_speed_fraction * phi.v_max * kTickSeconds);
  const Rect& b = config_.layout.bounds;
  double h = next.heading;
  if (next.position.x > b.max.x) {
    next.position.x = 2 * b.max.x - next.position.x;
    h = kPi - h;
  } else if (next.position.x < b.min.x) {
    next.position.x = 2 * b.min.x - next.position.x;
    h = kPi - h;
  }
  if (next.position.y > b.max.y) {
    next.position.y = 2 * b.max.y - next.position.y;
    h = -h;
  } else if (next.position.y < b.min.y) {
    next.position.y = 2 * b.min.y - next.position.y;
    h = -h;
  }
  next.heading = wrap_angle(h);
  next.position = b.clamp(next.position);
  return next;
}

void World::reset_robot() {
  AgentRuntime& robot = agents_[kRobot];
  robot.pose = config_.robot.start_pose;
  robot.s = config_.robot.s0;
  robot.estimate = EstimatedState{};
  for (int i : {kRobot, kParticipant}) {
    agents_[i].other_history.clear();
    agents_[i].other_history.push_back(agents_[1 - i].pose);
  }
}

void World::step() {
  if (done_) return;
  if (reset_pending_) {
    reset_pending_ = false;
    reset_robot();
    ++tick_;
    task_start_tick_ = tick_;
    log_.meta.tasks.push_back(
        {task_, current_target(), tick_, tick_, false, false});
    record(false, false);
    return;
  }

  for (int i : {kRobot, kParticipant}) {
    if (estimates(spec(i).policy)) perceive(i);
  }

  std::array<Pose, 2> next;
  for (int i : {kRobot, kParticipant}) {
    const AgentSpec& s = spec(i);
    const AgentRuntime& self = agents_[i];
    const AgentRuntime& other = agents_[1 - i];
    switch (s.policy) {
      case Policy::kModel:
        next[i] = step_kinematics(
            self.pose, behavior_field(self.pose, other.pose, self.s, s.phi),
            kTickSeconds, config_.layout.bounds);
        break;
      case Policy::kGoalSeek:
        next[i] = step_kinematics(self.pose, goal_seek_command(i), kTickSeconds,
                                  config_.layout.bounds);
        break;
      case Policy::kInput:
        next[i] = step_kinematics(self.pose, input_command(i), kTickSeconds,
                                  config_.layout.bounds);
        break;
      case Policy::kRandomWalk:
        next[i] = random_walk_step(i);
        break;
      case Policy::kStationary:
        next[i] = self.pose;
        break;
    }
  }
  for (int i : {kRobot, kParticipant}) agents_[i].pose = next[i];
  for (int i : {kRobot, kParticipant}) {
    auto& history = agents_[i].other_history;
    history.push_back(agents_[1 - i].pose);
    while (static_cast<int>(history.size()) > spec(i).cog.window + 1) {
      history.pop_front();
    }
  }
  ++tick_;

  const double reach =
      (target_position() - agents_[kParticipant].pose.position).norm();
  const bool complete = reach <= config_.capture_radius;
  const bool capped =
      !complete &&
      (tick_ - task_start_tick_) * kTickSeconds >= config_.task_cap_seconds - 1e-9;
  record(complete, capped);
  if (complete || capped) {
    TaskRecord& rec = log_.meta.tasks.back();
    rec.completed = complete;
    rec.capped = capped;
    if (task_ + 1 == config_.task_count) {
      done_ = true;
    } else {
      ++task_;
      reset_pending_ = true;
    }
  }
}

void World::record(bool complete, bool capped) {
  Sample s;
  s.tick = tick_;
  s.task = task_;
  s.target = config_.schedule.entries[s.task];
  for (int i : {kRobot, kParticipant}) {
    const AgentRuntime& a = agents_[i];
    s.agents[i] = {spec(i).id, a.pose, a.s, a.estimate};
  }
  s.task_complete = complete;
  s.task_capped = capped;
  log_.samples.push_back(s);
  log_.meta.tasks.back().last_tick = tick_;
}

}  // namespace proxsim
