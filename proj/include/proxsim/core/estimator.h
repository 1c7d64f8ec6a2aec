#ifndef PROXSIM_CORE_ESTIMATOR_H_
#define PROXSIM_CORE_ESTIMATOR_H_

#include <vector>

#include "proxsim/core/geometry.h"
#include "proxsim/core/types.h"

namespace proxsim {

// What an observer saw of the other agent over one window: the observer's own
// pose (held fixed), where the other started, how the relational state
// changed, and the other's mean translational speed.
struct Observation {
  Pose self;
  Pose other_before;
  MotionDelta delta;
  double other_speed = 0.0;
};

Observation observe(const Pose& self, const Pose& other_before,
                    const Pose& other_after, int window);

// Values of the estimator lattice on one axis: grid_n points evenly covering
// [-1, 1], symmetric, with 0 exactly on the grid.
std::vector<double> grid_axis(int grid_n);

// Normalized distance l in [0, 1] between two motion deltas. Radial error is
// scaled by the distance v_max covers in the window and angular errors by
// the angle swept at v_max / r_int, then the 3-vector norm is divided by
// sqrt(3) and capped at 1.
double behavior_mismatch(const MotionDelta& diff, const BehaviorParams& phi,
                         int window);

// Motion delta the other would produce over `window` ticks if it followed the
// behavior field with state s, starting at other_before, while the observer
// stands still at self.
MotionDelta predict_other_motion(const Pose& self, const Pose& other_before,
                                 const InternalState& s,
                                 const BehaviorParams& phi, int window);

// Grid-search estimate of the other's internal state: the lattice candidate
// whose predicted motion is most similar to the observed one, scored
// L = 1 - l. Exact ties go to the candidate nearest prev.s_hat, then to the
// smallest norm. If the other was still (speed < eps_v) prev is returned
// with informative = false.
EstimatedState estimate_internal(const Observation& obs,
                                 const BehaviorParams& phi_hat,
                                 const CognitiveParams& cog,
                                 const EstimatedState& prev);

}  // namespace proxsim

#endif  // PROXSIM_CORE_ESTIMATOR_H_
