#include "proxsim/core/dynamics.h"

namespace proxsim {

InternalState update_internal(const InternalState& s,
                              const EstimatedState& other,
                              const CognitiveParams& cog) {
  if (!other.informative) return s;
  const double gain = cog.rule == UpdateRule::kGapClosing ? cog.psi : -cog.psi;
  InternalState next{s.c + gain * (other.s_hat.a - s.c),
                     s.a + gain * (other.s_hat.c - s.a)};
  return next.clamped();
}

}  // namespace proxsim
