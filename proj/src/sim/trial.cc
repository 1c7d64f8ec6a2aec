#include "proxsim/sim/trial.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace proxsim {

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::kPsi0001: return "psi_0.001";
    case Condition::kPsi0005: return "psi_0.005";
    case Condition::kPsi001: return "psi_0.01";
    case Condition::kRandomWalk: return "random_walk";
  }
  return "";
}

std::optional<Condition> parse_condition(std::string_view name) {
  for (Condition c : kAllConditions) {
    if (name == condition_name(c)) return c;
  }
  return std::nullopt;
}

std::optional<double> condition_psi(Condition c) {
  switch (c) {
    case Condition::kPsi0001: return 0.001;
    case Condition::kPsi0005: return 0.005;
    case Condition::kPsi001: return 0.01;
    case Condition::kRandomWalk: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Condition> condition_for_psi(double psi) {
  for (Condition c : kAllConditions) {
    const auto p = condition_psi(c);
    if (p && std::abs(*p - psi) < 1e-12) return c;
  }
  return std::nullopt;
}

std::string preset_name(ParticipantPreset p) {
  return p == ParticipantPreset::kRejecting ? "rejecting" : "approaching";
}

std::optional<ParticipantPreset> parse_preset(std::string_view name) {
  if (name == "rejecting" || name == "rejection") return ParticipantPreset::kRejecting;
  if (name == "approaching" || name == "approach") return ParticipantPreset::kApproaching;
  return std::nullopt;
}

InternalState preset_state(ParticipantPreset p) {
  return p == ParticipantPreset::kRejecting ? InternalState{0.0, 0.0}
                                            : InternalState{0.5, 0.5};
}

double preset_psi(ParticipantPreset p) {
  return p == ParticipantPreset::kRejecting ? -0.005 : 0.0;
}

WorldConfig make_world_config(const TrialConfig& config, std::uint64_t seed,
                              bool input_driven) {
  WorldConfig w;
  w.layout = config.layout;
  w.schedule = designate_targets(seed, config.layout);
  w.seed = seed;
  w.capture_radius = config.capture_radius;
  w.task_cap_seconds = config.task_cap_seconds;

  AgentSpec& robot = w.robot;
  robot.id = "robot";
  const auto psi = condition_psi(config.condition);
  robot.policy = psi ? Policy::kModel : Policy::kRandomWalk;
  robot.phi = config.robot_phi;
  robot.phi_hat = config.participant_phi;
  robot.cog = config.robot_cog;
  robot.cog.psi = psi.value_or(0.0);
  robot.s0 = config.robot_s0;
  robot.start_pose = {config.layout.robot_home, 0.0};

  AgentSpec& participant = w.participant;
  participant.id = "participant";
  participant.policy = input_driven ? Policy::kInput : Policy::kGoalSeek;
  participant.phi = config.participant_phi;
  participant.phi_hat = config.robot_phi;
  participant.cog = config.participant_cog;
  participant.cog.psi = config.psi_participant.value_or(preset_psi(config.preset));
  participant.s0 = input_driven ? InternalState{} : preset_state(config.preset);
  participant.start_pose = participant_start_pose(w.layout, w.schedule);

  w.meta.condition = condition_name(config.condition);
  w.meta.psi_robot = psi;
  w.meta.psi_participant = input_driven ? 0.0 : participant.cog.psi;
  w.meta.participant = input_driven ? "input" : preset_name(config.preset);
  return w;
}

TrajectoryLog run_trial(const TrialConfig& config, std::uint64_t seed) {
  World world(make_world_config(config, seed));
  while (!world.done()) world.step();
  return world.take_log();
}

std::string log_stem(Condition c, std::uint64_t seed) {
  std::string s = std::to_string(seed);
  if (s.size() < 6) s.insert(0, 6 - s.size(), '0');
  return condition_name(c) + "_seed" + s;
}

ExperimentResult run_experiment(const TrialConfig& config,
                                int n_trials_per_condition,
                                std::uint64_t base_seed, unsigned workers) {
  if (n_trials_per_condition < 1) {
    throw std::invalid_argument("need at least one trial per condition");
  }
  ExperimentResult result;
  std::vector<TrialConfig> jobs;
  for (Condition c : kAllConditions) {
    for (int i = 0; i < n_trials_per_condition; ++i) {
      TrialConfig tc = config;
      tc.condition = c;
      jobs.push_back(tc);
      const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
      result.manifest.push_back({log_stem(c, seed), condition_name(c), seed, i});
    }
  }
  result.logs.resize(jobs.size());

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      result.logs[j] = run_trial(jobs[j], result.manifest[j].seed);
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned w = 1; w < workers; ++w) pool.push_back(std::async(std::launch::async, work));
  work();
  for (auto& f : pool) f.get();
  return result;
}

std::string manifest_to_json(const std::vector<ManifestEntry>& manifest) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const ManifestEntry& e : manifest) {
    j.push_back({{"log", e.stem},
                 {"condition", e.condition},
                 {"seed", e.seed},
                 {"trial", e.trial}});
  }
  return j.dump(2);
}

std::vector<ManifestEntry> manifest_from_json(const std::string& text) {
  std::vector<ManifestEntry> out;
  for (const auto& e : nlohmann::json::parse(text)) {
    out.push_back({e.at("log").get<std::string>(),
                   e.at("condition").get<std::string>(),
                   e.at("seed").get<std::uint64_t>(), e.at("trial").get<int>()});
  }
  return out;
}

void write_manifest(const std::vector<ManifestEntry>& manifest,
                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest.json");
  out << manifest_to_json(manifest) << '\n';
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("cannot read " + (dir / "manifest.json").string());
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  try {
    return manifest_from_json(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace proxsim
