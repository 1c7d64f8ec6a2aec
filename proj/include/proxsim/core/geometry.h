#ifndef PROXSIM_CORE_GEOMETRY_H_
#define PROXSIM_CORE_GEOMETRY_H_

#include <cmath>
#include <numbers>

namespace proxsim {

// Simulated time per tick. Every clock in the project (batch simulation,
// live sessions, logs) advances in these units.
inline constexpr double kTickSeconds = 0.05;

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
};

inline Vec2 unit_from_angle(double angle) {
  return {std::cos(angle), std::sin(angle)};
}

// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

// Axis-aligned rectangle [min.x, max.x] x [min.y, max.y].
struct Rect {
  Vec2 min;
  Vec2 max;

  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  Vec2 clamp(const Vec2& p) const;
  bool operator==(const Rect&) const = default;
};

// World-frame pose. heading is kept in (-pi, pi].
struct Pose {
  Vec2 position;
  double heading = 0.0;

  bool operator==(const Pose&) const = default;
};

// Distance and the absolute bearing angles of a dyad, seen from "self" (1)
// towards "other" (2): theta12 is how far self's heading is from the
// direction to other, theta21 the same for other.
struct RelationalState {
  double r = 0.0;
  double theta12 = 0.0;
  double theta21 = 0.0;
};

// Change of a RelationalState over an observation window.
struct MotionDelta {
  double d_r = 0.0;
  double d_theta12 = 0.0;
  double d_theta21 = 0.0;

  bool operator==(const MotionDelta&) const = default;
};

MotionDelta operator-(const RelationalState& after,
                      const RelationalState& before);

// Executable action of an agent. The agent is holonomic: translation follows
// move_bearing, heading changes only through turn_rate.
struct MotionCommand {
  double speed = 0.0;         // m/s
  double turn_rate = 0.0;     // rad/s
  double move_bearing = 0.0;  // world-frame direction of translation
};

// Bearing (world frame) of the vector from `from` to `to`.
double bearing(const Vec2& from, const Vec2& to);

// Coincident positions give r = 0 with both angles 0.
RelationalState relational_state(const Pose& self, const Pose& other);

// Advances a pose by one command over dt seconds. The bounded overload clamps
// the resulting position to the field rectangle.
Pose step_kinematics(const Pose& p, const MotionCommand& cmd, double dt);
Pose step_kinematics(const Pose& p, const MotionCommand& cmd, double dt,
                     const Rect& bounds);

// Change of the relational state attributable to the other agent's motion:
// self is held fixed at `self` while other moves from before to after.
MotionDelta motion_delta_of_other(const Pose& self, const Pose& other_before,
                                  const Pose& other_after);

}  // namespace proxsim

#endif  // PROXSIM_CORE_GEOMETRY_H_
