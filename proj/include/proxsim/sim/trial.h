#ifndef PROXSIM_SIM_TRIAL_H_
#define PROXSIM_SIM_TRIAL_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxsim/core/types.h"
#include "proxsim/sim/layout.h"
#include "proxsim/sim/trajectory_log.h"
#include "proxsim/sim/world.h"

namespace proxsim {

// The four robot conditions of the experiment.
enum class Condition { kPsi0001, kPsi0005, kPsi001, kRandomWalk };

inline constexpr std::array<Condition, 4> kAllConditions = {
    Condition::kPsi0001, Condition::kPsi0005, Condition::kPsi001,
    Condition::kRandomWalk};

// "psi_0.001", "psi_0.005", "psi_0.01", "random_walk"
std::string condition_name(Condition c);
std::optional<Condition> parse_condition(std::string_view name);
// Robot consideration gain; empty for the random walker.
std::optional<double> condition_psi(Condition c);
std::optional<Condition> condition_for_psi(double psi);

enum class ParticipantPreset {
  kRejecting,    // s = (0, 0), psi = -0.005: turns against an approaching robot
  kApproaching,  // s = (0.5, 0.5), psi = 0
};

std::string preset_name(ParticipantPreset p);
std::optional<ParticipantPreset> parse_preset(std::string_view name);

struct TrialConfig {
  Condition condition = Condition::kPsi0001;
  ParticipantPreset preset = ParticipantPreset::kRejecting;
  FieldLayout layout = FieldLayout::standard();
  BehaviorParams robot_phi;
  // Walking on an omnidirectional treadmill is slower than overground.
  BehaviorParams participant_phi{.v_max = 0.8};
  CognitiveParams robot_cog;        // psi is taken from the condition
  CognitiveParams participant_cog;  // psi is taken from the preset...
  std::optional<double> psi_participant;  // ...unless overridden here
  InternalState robot_s0{0.5, 0.5};
  double capture_radius = 0.8;
  double task_cap_seconds = 40.0;
};

InternalState preset_state(ParticipantPreset p);
double preset_psi(ParticipantPreset p);

// Full world configuration for one trial. The participant is scripted
// (GoalSeek) unless input_driven is set, in which case it follows set_input().
WorldConfig make_world_config(const TrialConfig& config, std::uint64_t seed,
                              bool input_driven = false);

// Simulates all ten tasks (or until each task's tick cap).
TrajectoryLog run_trial(const TrialConfig& config, std::uint64_t seed);

struct ManifestEntry {
  std::string stem;
  std::string condition;
  std::uint64_t seed = 0;
  int trial = 0;  // index within the condition

  bool operator==(const ManifestEntry&) const = default;
};

struct ExperimentResult {
  std::vector<TrajectoryLog> logs;
  std::vector<ManifestEntry> manifest;
};

std::string log_stem(Condition c, std::uint64_t seed);

// All four conditions x n trials, seeds base_seed + i shared across
// conditions. Trials fan out over `workers` threads (0 = hardware
// concurrency); output order is condition-major, then seed.
ExperimentResult run_experiment(const TrialConfig& config,
                                int n_trials_per_condition,
                                std::uint64_t base_seed, unsigned workers = 0);

std::string manifest_to_json(const std::vector<ManifestEntry>& manifest);
std::vector<ManifestEntry> manifest_from_json(const std::string& text);
void write_manifest(const std::vector<ManifestEntry>& manifest,
                    const std::filesystem::path& dir);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir);

}  // namespace proxsim

#endif  // PROXSIM_SIM_TRIAL_H_
