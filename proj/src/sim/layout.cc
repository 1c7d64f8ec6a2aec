#include "proxsim/sim/layout.h"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <utility>

namespace proxsim {

FieldLayout FieldLayout::standard(double pole_radius, double half_extent) {
  FieldLayout layout;
  for (int i = 0; i < kNumPoles; ++i) {
    layout.poles[i] = unit_from_angle(2.0 * kPi * i / kNumPoles) * pole_radius;
  }
  layout.robot_home = {0.0, 0.0};
  layout.bounds = {{-half_extent, -half_extent}, {half_extent, half_extent}};
  return layout;
}

std::vector<int> FieldLayout::opposite_poles(int i) const {
  std::vector<int> out;
  const Vec2 ref = poles.at(i) - robot_home;
  for (int j = 0; j < kNumPoles; ++j) {
    if (j == i) continue;
    const Vec2 v = poles[j] - robot_home;
    const double angle = std::atan2(std::abs(ref.cross(v)), ref.dot(v));
    if (angle > kPi / 2) out.push_back(j);
  }
  return out;
}

void FieldLayout::validate() const {
  if (!(bounds.min.x < bounds.max.x && bounds.min.y < bounds.max.y)) {
    throw std::invalid_argument("layout bounds are empty");
  }
  if (!bounds.contains(robot_home)) {
    throw std::invalid_argument("robot home is outside the field");
  }
  for (int i = 0; i < kNumPoles; ++i) {
    if (!bounds.contains(poles[i])) {
      throw std::invalid_argument("pole " + std::to_string(i) +
                                  " is outside the field");
    }
    if (opposite_poles(i).size() != 3) {
      throw std::invalid_argument("pole " + std::to_string(i) +
                                  " does not have three opposite poles");
    }
  }
}

std::string Target::id() const {
  return is_pole() ? "pole:" + std::to_string(pole) : "object";
}

Target Target::parse(const std::string& id) {
  if (id == "object") return Object();
  if (id.rfind("pole:", 0) == 0) {
    const int index = std::stoi(id.substr(5));
    if (index >= 0 && index < kNumPoles) return Pole(index);
  }
  throw std::invalid_argument("bad target id: " + id);
}

void TaskSchedule::validate(const FieldLayout& layout) const {
  if (entries.size() != kTasksPerTrial) {
    throw std::invalid_argument("schedule must have 10 entries");
  }
  int poles = 0;
  int previous_pole = -1;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Target& t = entries[k];
    if (!t.is_pole()) {
      if (k > 0 && !entries[k - 1].is_pole()) {
        throw std::invalid_argument("consecutive object targets");
      }
      continue;
    }
    ++poles;
    if (previous_pole >= 0) {
      const auto opposite = layout.opposite_poles(previous_pole);
      if (std::find(opposite.begin(), opposite.end(), t.pole) ==
          opposite.end()) {
        throw std::invalid_argument("pole target not opposite the previous");
      }
    }
    previous_pole = t.pole;
  }
  if (poles != kPoleTasksPerTrial) {
    throw std::invalid_argument("schedule must have 8 pole targets");
  }
}

TaskSchedule designate_targets(std::uint64_t seed, const FieldLayout& layout) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x5c4edu};
  std::mt19937_64 rng(seq);

  std::vector<std::pair<int, int>> slot_pairs;
  for (int i = 0; i < kTasksPerTrial; ++i) {
    for (int j = i + 2; j < kTasksPerTrial; ++j) slot_pairs.emplace_back(i, j);
  }
  std::uniform_int_distribution<std::size_t> pick_pair(0, slot_pairs.size() - 1);
  const auto [first_object, second_object] = slot_pairs[pick_pair(rng)];

  TaskSchedule schedule;
  int previous_pole = -1;
  for (int k = 0; k < kTasksPerTrial; ++k) {
    if (k == first_object || k == second_object) {
      schedule.entries.push_back(Target::Object());
      continue;
    }
    int pole;
    if (previous_pole < 0) {
      pole = std::uniform_int_distribution<int>(0, kNumPoles - 1)(rng);
    } else {
      const auto opposite = layout.opposite_poles(previous_pole);
      pole = opposite[std::uniform_int_distribution<std::size_t>(
          0, opposite.size() - 1)(rng)];
    }
    schedule.entries.push_back(Target::Pole(pole));
    previous_pole = pole;
  }
  return schedule;
}

}  // namespace proxsim
