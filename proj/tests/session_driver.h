#ifndef PROXSIM_TESTS_SESSION_DRIVER_H_
#define PROXSIM_TESTS_SESSION_DRIVER_H_

#include <cmath>
#include <string>

#include "json.hpp"

namespace proxsim::test {

// What a headless client does with a state frame: head straight for the
// current target (the next one when a task just ended). Returns the input
// message to send, or an empty string for non-state frames.
inline std::string steer_message(const std::string& frame, long long seq) {
  const nlohmann::json j = nlohmann::json::parse(frame);
  if (j.at("type") != "state") return {};
  const auto& target = j.contains("next_target") ? j["next_target"] : j["target"];
  const auto& me = j["agents"][1];
  double tx = 0, ty = 0;
  if (target["kind"] == "pole") {
    tx = target["x"].get<double>();
    ty = target["y"].get<double>();
  } else {
    tx = j["agents"][0]["x"].get<double>();
    ty = j["agents"][0]["y"].get<double>();
  }
  double dx = tx - me["x"].get<double>();
  double dy = ty - me["y"].get<double>();
  const double n = std::hypot(dx, dy);
  if (n > 0) {
    dx /= n;
    dy /= n;
  }
  return nlohmann::json{{"type", "input"}, {"seq", seq}, {"move", {dx, dy}}}.dump();
}

}  // namespace proxsim::test

#endif  // PROXSIM_TESTS_SESSION_DRIVER_H_
