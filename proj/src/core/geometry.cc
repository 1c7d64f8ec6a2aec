#include "proxsim/core/geometry.h"

#include <algorithm>

namespace proxsim {

double wrap_angle(double angle) {
  double w = std::remainder(angle, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

Vec2 Rect::clamp(const Vec2& p) const {
  return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y)};
}

MotionDelta operator-(const RelationalState& after,
                      const RelationalState& before) {
  return {after.r - before.r, after.theta12 - before.theta12,
          after.theta21 - before.theta21};
}

double bearing(const Vec2& from, const Vec2& to) {
  const Vec2 d = to - from;
  return std::atan2(d.y, d.x);
}

RelationalState relational_state(const Pose& self, const Pose& other) {
  const Vec2 d = other.position - self.position;
  const double r = d.norm();
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double to_other = std::atan2(d.y, d.x);
  const double to_self = std::atan2(-d.y, -d.x);
  return {r, std::abs(wrap_angle(to_other - self.heading)),
          std::abs(wrap_angle(to_self - other.heading))};
}

Pose step_kinematics(const Pose& p, const MotionCommand& cmd, double dt) {
  Pose next;
  next.heading = wrap_angle(p.heading + cmd.turn_rate * dt);
  next.position = p.position + unit_from_angle(cmd.move_bearing) * (cmd.speed * dt);
  return next;
}

Pose step_kinematics(const Pose& p, const MotionCommand& cmd, double dt,
                     const Rect& bounds) {
  Pose next = step_kinematics(p, cmd, dt);
  next.position = bounds.clamp(next.position);
  return next;
}

MotionDelta motion_delta_of_other(const Pose& self, const Pose& other_before,
                                  const Pose& other_after) {
  return relational_state(self, other_after) -
         relational_state(self, other_before);
}

}  // namespace proxsim
