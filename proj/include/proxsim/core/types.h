#ifndef PROXSIM_CORE_TYPES_H_
#define PROXSIM_CORE_TYPES_H_

#include <algorithm>

#include "proxsim/core/geometry.h"

namespace proxsim {

// (Control, Acceptance) of one agent towards the other, both in [-1, 1].
// Control is the desire to get involved with the other; Acceptance is the
// desire to be approached by the other.
struct InternalState {
  double c = 0.0;
  double a = 0.0;

  InternalState clamped() const {
    return {std::clamp(c, -1.0, 1.0), std::clamp(a, -1.0, 1.0)};
  }
  bool operator==(const InternalState&) const = default;
};

// Behavioral characteristics of an agent (speed, turning, and the distance
// constants of the reference behavior field).
struct BehaviorParams {
  double v_max = 1.4;         // m/s
  double omega_max = kPi;     // rad/s
  double r_int = 1.2;         // approach stops here
  double r_rep = 4.0;         // repulsion starts here
  double s_r = 1.0;           // width of both distance ramps

  // Throws std::invalid_argument when a constant is non-positive or
  // r_int >= r_rep.
  void validate() const;
};

// Which sign of the internal-state feedback to apply. kGapClosing moves
// (c, a) towards the other's estimated (a, c) for psi > 0. kAsPrinted keeps
// the leading minus sign of the update as originally written, under which
// psi > 0 moves away; it exists for side-by-side comparison only.
enum class UpdateRule { kGapClosing, kAsPrinted };

struct CognitiveParams {
  double psi = 0.0;       // per-tick consideration gain, may be negative
  int grid_n = 21;        // estimator lattice points per axis, odd
  int window = 4;         // ticks of observed motion per estimate
  double eps_v = 0.05;    // m/s, below this the other counts as still
  UpdateRule rule = UpdateRule::kGapClosing;

  void validate() const;
};

struct EstimatedState {
  InternalState s_hat;
  double score = 0.0;        // L value of the chosen candidate
  bool informative = false;  // false when nothing was learned this tick

  bool operator==(const EstimatedState&) const = default;
};

}  // namespace proxsim

#endif  // PROXSIM_CORE_TYPES_H_
