#include "proxsim/core/types.h"

#include <stdexcept>

namespace proxsim {

void BehaviorParams::validate() const {
  if (!(v_max > 0 && omega_max > 0 && r_int > 0 && r_rep > 0 && s_r > 0)) {
    throw std::invalid_argument("behavior params must be strictly positive");
  }
  if (!(r_int < r_rep)) {
    throw std::invalid_argument("behavior params need r_int < r_rep");
  }
}

void CognitiveParams::validate() const {
  if (grid_n < 3 || grid_n % 2 == 0) {
    throw std::invalid_argument("grid_n must be odd and >= 3");
  }
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (!(eps_v > 0)) throw std::invalid_argument("eps_v must be > 0");
}

}  // namespace proxsim
