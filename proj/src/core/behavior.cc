#include "proxsim/core/behavior.h"

#include <algorithm>
#include <cmath>

namespace proxsim {

double ramp(double x) { return std::clamp(x, 0.0, 1.0); }

double field_drive(const RelationalState& x, const InternalState& s,
                   const BehaviorParams& phi) {
  const double far = ramp((x.r - phi.r_int) / phi.s_r);
  const double near = ramp((phi.r_rep - x.r) / phi.s_r);
  const double attend = std::max(0.0, std::cos(x.theta21));
  const double reluctance = std::max(0.0, -s.c);
  const double reserve = std::max(0.0, -s.a) * attend;
  const double approach = std::max(0.0, s.c) * far;
  const double avoid = near * (1.0 - (1.0 - reluctance) * (1.0 - reserve));
  return approach - avoid;
}

double acceptance_turn_rate(const Pose& self, const Pose& other, double a,
                            const BehaviorParams& phi) {
  if (a == 0.0 || self.position == other.position) return 0.0;
  const double e =
      wrap_angle(self.heading - bearing(self.position, other.position));
  return std::clamp(-a * phi.omega_max * std::sin(e), -phi.omega_max,
                    phi.omega_max);
}

MotionCommand behavior_field(const Pose& self, const Pose& other,
                             const InternalState& s,
                             const BehaviorParams& phi) {
  MotionCommand cmd;
  cmd.turn_rate = acceptance_turn_rate(self, other, s.a, phi);
  const RelationalState x = relational_state(self, other);
  if (x.r == 0.0) {
    cmd.move_bearing = self.heading;
    return cmd;
  }
  const double drive = field_drive(x, s, phi);
  const double to_other = bearing(self.position, other.position);
  cmd.speed = phi.v_max * std::abs(drive);
  cmd.move_bearing = drive < 0 ? wrap_angle(to_other + kPi) : to_other;
  return cmd;
}

}  // namespace proxsim
