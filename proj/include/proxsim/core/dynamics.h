#ifndef PROXSIM_CORE_DYNAMICS_H_
#define PROXSIM_CORE_DYNAMICS_H_

#include "proxsim/core/types.h"

namespace proxsim {

// One tick of internal-state feedback towards the other's estimate:
//   dc = psi * (a_hat - c),  da = psi * (c_hat - a)
// (negated under UpdateRule::kAsPrinted), then clamped to [-1, 1]^2.
// Uninformative estimates leave s unchanged.
InternalState update_internal(const InternalState& s,
                              const EstimatedState& other,
                              const CognitiveParams& cog);

}  // namespace proxsim

#endif  // PROXSIM_CORE_DYNAMICS_H_
