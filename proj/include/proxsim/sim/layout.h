#ifndef PROXSIM_SIM_LAYOUT_H_
#define PROXSIM_SIM_LAYOUT_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "proxsim/core/geometry.h"

namespace proxsim {

inline constexpr int kNumPoles = 6;
inline constexpr int kTasksPerTrial = 10;
inline constexpr int kPoleTasksPerTrial = 8;
inline constexpr int kObjectTasksPerTrial = 2;

struct FieldLayout {
  std::array<Vec2, kNumPoles> poles;
  Vec2 robot_home;
  Rect bounds;

  // Poles on a regular hexagon of the given radius around the origin, pole 0
  // on the +x axis and numbered counter-clockwise; square field of the given
  // half-extent.
  static FieldLayout standard(double pole_radius = 8.0,
                              double half_extent = 10.0);

  // Throws std::invalid_argument if the home or a pole is outside bounds, or
  // if some pole does not have exactly three poles on its opposite side.
  void validate() const;

  // Poles whose angular distance from pole i, measured around robot_home,
  // exceeds 90 degrees; ascending index order.
  std::vector<int> opposite_poles(int i) const;

  bool operator==(const FieldLayout&) const = default;
};

struct Target {
  enum class Kind { kPole, kObject };
  Kind kind = Kind::kPole;
  int pole = -1;  // valid for kPole only

  static Target Pole(int index) { return {Kind::kPole, index}; }
  static Target Object() { return {Kind::kObject, -1}; }
  bool is_pole() const { return kind == Kind::kPole; }

  // "pole:<index>" or "object"
  std::string id() const;
  static Target parse(const std::string& id);

  bool operator==(const Target&) const = default;
};

// Ten targets of one trial: eight poles and two objects held by the robot.
struct TaskSchedule {
  std::vector<Target> entries;

  // Throws std::invalid_argument on a violated schedule rule.
  void validate(const FieldLayout& layout) const;

  bool operator==(const TaskSchedule&) const = default;
};

// Random schedule, deterministic in the seed. The two object slots are drawn
// uniformly among the non-adjacent slot pairs; the first pole uniformly over
// all poles, each later pole uniformly over the opposite side of the
// previous pole target.
TaskSchedule designate_targets(std::uint64_t seed, const FieldLayout& layout);

}  // namespace proxsim

#endif  // PROXSIM_SIM_LAYOUT_H_
