#include "proxsim/core/estimator.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "proxsim/core/behavior.h"

namespace proxsim {

Observation observe(const Pose& self, const Pose& other_before,
                    const Pose& other_after, int window) {
  Observation obs;
  obs.self = self;
  obs.other_before = other_before;
  obs.delta = motion_delta_of_other(self, other_before, other_after);
  obs.other_speed = (other_after.position - other_before.position).norm() /
                    (window * kTickSeconds);
  return obs;
}

std::vector<double> grid_axis(int grid_n) {
  std::vector<double> axis(grid_n);
  const int span = grid_n - 1;
  for (int i = 0; i < grid_n; ++i) {
    axis[i] = static_cast<double>(2 * i - span) / span;
  }
  return axis;
}

double behavior_mismatch(const MotionDelta& diff, const BehaviorParams& phi,
                         int window) {
  const double dt_w = window * kTickSeconds;
  const double radial = phi.v_max * dt_w;
  const double angular = phi.v_max / phi.r_int * dt_w;
  const double u = diff.d_r / radial;
  const double v = diff.d_theta12 / angular;
  const double w = diff.d_theta21 / angular;
  return std::min(1.0, std::sqrt(u * u + v * v + w * w) / std::sqrt(3.0));
}

MotionDelta predict_other_motion(const Pose& self, const Pose& other_before,
                                 const InternalState& s,
                                 const BehaviorParams& phi, int window) {
  Pose other = other_before;
  for (int t = 0; t < window; ++t) {
    const MotionCommand cmd = behavior_field(other, self, s, phi);
    other = step_kinematics(other, cmd, kTickSeconds);
  }
  return motion_delta_of_other(self, other_before, other);
}

namespace {

// Same prediction as predict_other_motion, exploiting that the behavior field
// only translates along the line between the agents: with the observer
// fixed, the distance and the other's heading offset evolve independently
// and the observer's own bearing angle does not change.
class RadialPredictor {
 public:
  RadialPredictor(const Observation& obs, const BehaviorParams& phi, int window)
      : phi_(phi), window_(window) {
    const RelationalState x = relational_state(obs.self, obs.other_before);
    r0_ = x.r;
    theta12_ = x.theta12;
    if (r0_ > 0) {
      offset0_ = wrap_angle(obs.other_before.heading -
                            bearing(obs.other_before.position, obs.self.position));
    }
  }

  MotionDelta operator()(const InternalState& s) const {
    if (r0_ == 0.0) return {};
    // The other's view of the dyad: its own angle is |offset|, the
    // observer's is theta12.
    RelationalState x{r0_, 0.0, theta12_};
    double offset = offset0_;
    for (int t = 0; t < window_; ++t) {
      x.theta12 = std::abs(offset);
      const double drive = field_drive(x, s, phi_);
      const double turn = s.a == 0.0
                              ? 0.0
                              : std::clamp(-s.a * phi_.omega_max * std::sin(offset),
                                           -phi_.omega_max, phi_.omega_max);
      x.r = std::max(0.0, x.r - phi_.v_max * drive * kTickSeconds);
      offset = wrap_angle(offset + turn * kTickSeconds);
    }
    return {x.r - r0_, 0.0, std::abs(offset) - std::abs(offset0_)};
  }

 private:
  const BehaviorParams& phi_;
  int window_;
  double r0_ = 0.0;
  double theta12_ = 0.0;
  double offset0_ = 0.0;
};

}  // namespace

EstimatedState estimate_internal(const Observation& obs,
                                 const BehaviorParams& phi_hat,
                                 const CognitiveParams& cog,
                                 const EstimatedState& prev) {
  if (obs.other_speed < cog.eps_v) {
    EstimatedState held = prev;
    held.informative = false;
    return held;
  }

  const std::vector<double> axis = grid_axis(cog.grid_n);
  const RadialPredictor predict(obs, phi_hat, cog.window);
  EstimatedState best;
  best.score = -std::numeric_limits<double>::infinity();
  double best_prev_dist = 0.0;
  double best_norm = 0.0;
  for (double c : axis) {
    for (double a : axis) {
      const InternalState candidate{c, a};
      const MotionDelta predicted = predict(candidate);
      const MotionDelta diff{predicted.d_r - obs.delta.d_r,
                             predicted.d_theta12 - obs.delta.d_theta12,
                             predicted.d_theta21 - obs.delta.d_theta21};
      const double score = 1.0 - behavior_mismatch(diff, phi_hat, cog.window);
      const double prev_dist =
          std::hypot(c - prev.s_hat.c, a - prev.s_hat.a);
      const double norm = std::hypot(c, a);
      const bool better =
          score > best.score ||
          (score == best.score &&
           (prev_dist < best_prev_dist ||
            (prev_dist == best_prev_dist && norm < best_norm)));
      if (better) {
        best.s_hat = candidate;
        best.score = score;
        best_prev_dist = prev_dist;
        best_norm = norm;
      }
    }
  }
  best.informative = true;
  return best;
}

}  // namespace proxsim
