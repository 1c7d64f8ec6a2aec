#ifndef PROXSIM_CORE_BEHAVIOR_H_
#define PROXSIM_CORE_BEHAVIOR_H_

#include "proxsim/core/geometry.h"
#include "proxsim/core/types.h"

namespace proxsim {

// clamp(x, 0, 1)
double ramp(double x);

// Signed drive towards the other agent, in [-1, 1].
//
//   far    = ramp((r - r_int) / s_r)       approach fades out near r_int
//   near   = ramp((r_rep - r) / s_r)       repulsion fades in inside r_rep
//   attend = max(0, cos theta21)           the other is looking at us
//
//   drive  = max(0, c) * far
//            - near * (1 - (1 - max(0, -c)) * (1 - max(0, -a) * attend))
//
// The repulsive part combines "I do not want to approach" and "I do not want
// to be approached by someone who is looking at me" as a probabilistic OR, so
// it stays within [0, 1] and remains strictly monotone in c.
double field_drive(const RelationalState& x, const InternalState& s,
                   const BehaviorParams& phi);

// Heading rate expressing acceptance: agents with a > 0 turn to face the
// other, agents with a < 0 turn away, a = 0 holds its heading.
//   turn = -a * omega_max * sin(wrap(heading - bearing_to_other))
double acceptance_turn_rate(const Pose& self, const Pose& other, double a,
                            const BehaviorParams& phi);

// Reference behavior field f(x, s; phi): translation at v_max * |drive|
// straight towards (drive > 0) or away from (drive < 0) the other, heading
// driven by acceptance_turn_rate. Total; speed <= v_max, |turn| <= omega_max.
MotionCommand behavior_field(const Pose& self, const Pose& other,
                             const InternalState& s, const BehaviorParams& phi);

}  // namespace proxsim

#endif  // PROXSIM_CORE_BEHAVIOR_H_
