#ifndef PROXSIM_SESSION_SESSION_H_
#define PROXSIM_SESSION_SESSION_H_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proxsim/sim/trial.h"
#include "proxsim/sim/world.h"

namespace proxsim {

struct SessionConfig {
  Condition condition = Condition::kPsi0001;
  std::uint64_t seed = 0;
  TrialConfig trial;    // layout and agent parameters; condition is overridden
  bool debug = false;   // internal states and estimates in state frames
  bool practice = false;
  int practice_tasks = 4;  // pole tasks walked with a stationary robot first
};

// Throws std::invalid_argument naming the condition if it is unknown.
SessionConfig make_session_config(std::string_view condition, std::uint64_t seed);

// A desired-velocity command as applied at a session tick.
struct InputEvent {
  std::int64_t t = 0;  // session tick at which it took effect
  std::int64_t seq = 0;
  Vec2 move;

  bool operator==(const InputEvent&) const = default;
};

std::string input_trace_json(const SessionConfig& config,
                             std::span<const InputEvent> trace);
std::vector<InputEvent> input_trace_from_json(const std::string& text);

using ClientId = std::uint64_t;

// One participant session: an optional practice run followed by the trial.
// Not thread-safe; the owner serializes message handling and ticks.
class Session {
 public:
  Session(std::string id, SessionConfig config);

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }

  // Handles one inbound text message from a client. Returns the frames meant
  // for that client only (config on join, error frames).
  std::vector<std::string> handle_message(ClientId client, std::string_view text);
  // Registers a client and returns its config frame.
  std::string join(ClientId client);
  void disconnect(ClientId client);
  bool has_client(ClientId client) const;
  std::size_t client_count() const { return clients_.size(); }

  // Ticking starts with the first join and stops when the trial is over.
  bool running() const { return started_ && !finished_; }
  bool finished() const { return finished_; }

  // Advances one 50 ms step; returns the frames to broadcast to every
  // joined client (a state frame, plus trial_done on the last tick).
  std::vector<std::string> tick();

  std::int64_t ticks() const { return t_; }
  const std::vector<InputEvent>& input_trace() const { return trace_; }
  const TrajectoryLog& log() const;
  std::string config_frame() const;

  // Writes <stem>.meta.json, <stem>.jsonl and <stem>.inputs.json.
  void persist(const std::filesystem::path& dir, const std::string& stem) const;

 private:
  std::string state_frame() const;
  std::string trial_done_frame() const;

  std::string id_;
  SessionConfig config_;
  std::shared_ptr<struct SessionRunner> runner_;
  std::set<ClientId> clients_;
  std::optional<InputEvent> pending_;
  std::int64_t last_seq_ = std::numeric_limits<std::int64_t>::min();
  std::int64_t t_ = 0;
  bool started_ = false;
  bool finished_ = false;
  std::vector<InputEvent> trace_;
};

// Re-simulates a session offline from its configuration and input trace.
TrajectoryLog replay_session(const SessionConfig& config,
                             std::span<const InputEvent> trace);

// Routes messages from connections to sessions. A join without a session id
// (or with "new") opens a fresh session seeded base_seed + n.
class SessionHub {
 public:
  explicit SessionHub(SessionConfig defaults) : defaults_(std::move(defaults)) {}

  struct Outbound {
    ClientId client;
    std::string text;
  };

  std::vector<Outbound> handle_message(ClientId client, std::string_view text);
  void disconnect(ClientId client);

  // Ticks every running session; completed sessions are persisted to
  // out_dir when set.
  std::vector<Outbound> tick_all();

  Session* find(const std::string& id);
  std::size_t session_count() const { return sessions_.size(); }
  std::optional<std::filesystem::path> out_dir;

 private:
  SessionConfig defaults_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::map<ClientId, std::string> bound_;
  std::uint64_t opened_ = 0;
};

}  // namespace proxsim

#endif  // PROXSIM_SESSION_SESSION_H_
