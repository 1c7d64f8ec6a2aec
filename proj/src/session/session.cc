#include "proxsim/session/session.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "proxsim/analysis/metrics.h"

namespace proxsim {

using nlohmann::ordered_json;

SessionConfig make_session_config(std::string_view condition, std::uint64_t seed) {
  const auto c = parse_condition(condition);
  if (!c) throw std::invalid_argument("unknown condition '" + std::string(condition) + "'");
  SessionConfig config;
  config.condition = *c;
  config.seed = seed;
  return config;
}

// Steps the practice world (if any) and then the trial world. Shared by live
// sessions and offline replay so both advance identically.
struct SessionRunner {
  explicit SessionRunner(const SessionConfig& config) {
    TrialConfig tc = config.trial;
    tc.condition = config.condition;
    WorldConfig trial = make_world_config(tc, config.seed, /*input_driven=*/true);
    if (config.practice) {
      if (config.practice_tasks < 1 || config.practice_tasks > kPoleTasksPerTrial) {
        throw std::invalid_argument("practice_tasks must be in [1, 8]");
      }
      WorldConfig practice = trial;
      practice.robot.policy = Policy::kStationary;
      // Practice walks pole targets only, in schedule order. The objects
      // sit in the unused tail as P..P O P O to keep the schedule valid.
      std::vector<Target> poles;
      for (const Target& t : trial.schedule.entries) {
        if (t.is_pole()) poles.push_back(t);
      }
      auto& entries = practice.schedule.entries;
      entries.assign(poles.begin(), poles.end() - 1);
      entries.push_back(Target::Object());
      entries.push_back(poles.back());
      entries.push_back(Target::Object());
      practice.task_count = config.practice_tasks;
      practice.meta.condition = "practice";
      practice_ = std::make_unique<World>(std::move(practice));
    }
    trial_ = std::make_unique<World>(std::move(trial));
  }

  bool in_practice() const { return practice_ && !practice_->done(); }
  World& active() { return in_practice() ? *practice_ : *trial_; }
  const World& active() const { return in_practice() ? *practice_ : *trial_; }

  // Returns the world that was stepped.
  const World& step(const std::optional<Vec2>& move) {
    if (move) move_ = *move;
    World& world = active();
    world.set_input(move_);
    world.step();
    if (&world == practice_.get() && practice_->done()) trial_->set_input(move_);
    return world;
  }

  bool done() const { return trial_->done(); }

  std::unique_ptr<World> practice_;
  std::unique_ptr<World> trial_;
  Vec2 move_;
};

namespace {

ordered_json error_json(std::string_view code, std::string_view message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

ordered_json target_json(const World& world, const Target& target) {
  ordered_json j;
  if (target.is_pole()) {
    const Vec2 p = world.config().layout.poles[target.pole];
    j = {{"kind", "pole"}, {"pole", target.pole}, {"x", p.x}, {"y", p.y}};
  } else {
    j = {{"kind", "object"}, {"holder", "robot"}};
  }
  return j;
}

ordered_json layout_json(const FieldLayout& layout) {
  ordered_json poles = ordered_json::array();
  for (const Vec2& p : layout.poles) poles.push_back({p.x, p.y});
  return {{"poles", poles},
          {"robot_home", {layout.robot_home.x, layout.robot_home.y}},
          {"bounds",
           {layout.bounds.min.x, layout.bounds.min.y, layout.bounds.max.x,
            layout.bounds.max.y}}};
}

std::optional<Vec2> parse_move(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) return std::nullopt;
  if (!j[0].is_number() || !j[1].is_number()) return std::nullopt;
  const Vec2 v{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(v.x) || !std::isfinite(v.y)) return std::nullopt;
  return v;
}

Vec2 clamp_move(Vec2 m) {
  m.x = std::clamp(m.x, -1.0, 1.0);
  m.y = std::clamp(m.y, -1.0, 1.0);
  const double n = m.norm();
  return n > 1.0 ? m * (1.0 / n) : m;
}

}  // namespace

Session::Session(std::string id, SessionConfig config)
    : id_(std::move(id)),
      config_(std::move(config)),
      runner_(std::make_shared<SessionRunner>(config_)) {}

const TrajectoryLog& Session::log() const { return runner_->trial_->log(); }

std::string Session::config_frame() const {
  const World& world = *runner_->trial_;
  ordered_json j = {{"type", "config"},
                    {"session", id_},
                    {"condition", condition_name(config_.condition)},
                    {"seed", config_.seed},
                    {"tick_seconds", kTickSeconds},
                    {"tasks", kTasksPerTrial},
                    {"capture_radius", world.config().capture_radius},
                    {"v_max", world.config().participant.phi.v_max},
                    {"layout", layout_json(world.config().layout)},
                    {"practice", config_.practice},
                    {"debug", config_.debug}};
  return j.dump();
}

std::string Session::join(ClientId client) {
  clients_.insert(client);
  started_ = true;
  return config_frame();
}

void Session::disconnect(ClientId client) { clients_.erase(client); }

bool Session::has_client(ClientId client) const { return clients_.contains(client); }

std::vector<std::string> Session::handle_message(ClientId client, std::string_view text) {
  nlohmann::json msg;
  try {
    msg = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    return {error_json("bad_json", e.what()).dump()};
  }
  if (!msg.is_object()) return {error_json("bad_message", "expected a JSON object").dump()};
  const auto type = msg.find("type");
  if (type == msg.end() || !type->is_string()) {
    return {error_json("bad_type", "missing message type").dump()};
  }
  const std::string kind = type->get<std::string>();

  if (kind == "join") {
    if (has_client(client)) return {error_json("already_joined", "client already joined").dump()};
    const auto sid = msg.find("session");
    if (sid != msg.end() && !sid->is_null() &&
        !(sid->is_string() && sid->get<std::string>() == id_)) {
      return {error_json("unknown_session", "no such session").dump()};
    }
    return {join(client)};
  }
  if (kind == "input") {
    if (!has_client(client)) return {error_json("not_joined", "join first").dump()};
    if (finished_) return {error_json("session_over", "the trial has ended").dump()};
    const auto seq = msg.find("seq");
    const auto move = msg.find("move");
    if (seq == msg.end() || !seq->is_number_integer() || move == msg.end()) {
      return {error_json("bad_input", "input needs an integer seq and a move").dump()};
    }
    const auto m = parse_move(*move);
    if (!m) return {error_json("bad_input", "move must be two finite numbers").dump()};
    const std::int64_t s = seq->get<std::int64_t>();
    if (s <= last_seq_) return {};  // stale
    last_seq_ = s;
    pending_ = InputEvent{0, s, clamp_move(*m)};
    return {};
  }
  if (kind == "leave") {
    if (!has_client(client)) return {error_json("not_joined", "join first").dump()};
    disconnect(client);
    return {};
  }
  return {error_json("bad_type", "unknown message type '" + kind + "'").dump()};
}

std::vector<std::string> Session::tick() {
  if (!running()) return {};
  std::optional<Vec2> move;
  if (pending_) {
    pending_->t = t_;
    trace_.push_back(*pending_);
    move = pending_->move;
    pending_.reset();
  }
  runner_->step(move);
  ++t_;
  std::vector<std::string> out{state_frame()};
  if (runner_->done()) {
    finished_ = true;
    out.push_back(trial_done_frame());
  }
  return out;
}

std::string Session::state_frame() const {
  // After a step the active world is either the one just stepped or, right
  // after practice ends, the fresh trial world; frames describe the former.
  const SessionRunner& r = *runner_;
  const bool practice = r.practice_ && (r.in_practice() || r.trial_->tick() == 0);
  const World& world = practice ? *r.practice_ : *r.trial_;
  const Sample& s = world.log().samples.back();
  ordered_json agents = ordered_json::array();
  for (const AgentSample& a : s.agents) {
    agents.push_back({{"id", a.id},
                      {"x", a.pose.position.x},
                      {"y", a.pose.position.y},
                      {"heading", a.pose.heading}});
  }
  ordered_json j = {{"type", "state"},
                    {"t", t_},
                    {"phase", practice ? "practice" : "trial"},
                    {"task", s.task},
                    {"target", target_json(world, s.target)},
                    {"agents", agents},
                    {"task_complete", s.task_complete},
                    {"task_capped", s.task_capped},
                    {"trial_complete", world.done() && !practice}};
  if ((s.task_complete || s.task_capped) && !world.done()) {
    j["next_target"] = target_json(world, world.current_target());
  }
  if (config_.debug) {
    ordered_json d;
    for (const AgentSample& a : s.agents) {
      d[a.id] = {{"c", a.s.c},
                 {"a", a.s.a},
                 {"c_hat", a.estimate.s_hat.c},
                 {"a_hat", a.estimate.s_hat.a},
                 {"score", a.estimate.score},
                 {"informative", a.estimate.informative}};
    }
    j["debug"] = d;
  }
  return j.dump();
}

std::string Session::trial_done_frame() const {
  const TrajectoryLog& log = this->log();
  ordered_json tasks = ordered_json::array();
  double sum = 0.0;
  int n = 0;
  for (const TaskRecord& rec : log.meta.tasks) {
    const auto av = compute_avoidance(log, rec.index);
    if (av) {
      sum += av->a_void;
      ++n;
    }
    tasks.push_back({{"task", rec.index},
                     {"target", rec.target.id()},
                     {"completed", rec.completed},
                     {"capped", rec.capped},
                     {"a_void", av ? ordered_json(av->a_void) : ordered_json(nullptr)},
                     {"path_length", compute_path_length(log, rec.index)}});
  }
  ordered_json summary = {{"session", id_},
                          {"condition", condition_name(config_.condition)},
                          {"seed", config_.seed},
                          {"ticks", log.samples.back().tick},
                          {"mean_a_void", n ? ordered_json(sum / n) : ordered_json(nullptr)},
                          {"tasks", tasks}};
  return ordered_json{{"type", "trial_done"}, {"summary", summary}}.dump();
}

void Session::persist(const std::filesystem::path& dir, const std::string& stem) const {
  write_log(log(), dir, stem);
  std::ofstream out(dir / (stem + ".inputs.json"));
  if (!out) throw std::runtime_error("cannot write input trace");
  out << input_trace_json(config_, trace_) << '\n';
}

std::string input_trace_json(const SessionConfig& config,
                             std::span<const InputEvent> trace) {
  ordered_json events = ordered_json::array();
  for (const InputEvent& e : trace) {
    events.push_back({{"t", e.t}, {"seq", e.seq}, {"move", {e.move.x, e.move.y}}});
  }
  return ordered_json{{"condition", condition_name(config.condition)},
                      {"seed", config.seed},
                      {"practice", config.practice},
                      {"practice_tasks", config.practice_tasks},
                      {"tick_seconds", kTickSeconds},
                      {"events", events}}
      .dump(2);
}

std::vector<InputEvent> input_trace_from_json(const std::string& text) {
  std::vector<InputEvent> out;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    for (const auto& e : j.at("events")) {
      const auto& m = e.at("move");
      out.push_back({e.at("t").get<std::int64_t>(), e.at("seq").get<std::int64_t>(),
                     Vec2{m.at(0).get<double>(), m.at(1).get<double>()}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed input trace: ") + e.what());
  }
  return out;
}

TrajectoryLog replay_session(const SessionConfig& config,
                             std::span<const InputEvent> trace) {
  SessionRunner runner(config);
  std::size_t next = 0;
  for (std::int64_t t = 0; !runner.done(); ++t) {
    std::optional<Vec2> move;
    while (next < trace.size() && trace[next].t == t) move = trace[next++].move;
    runner.step(move);
  }
  return runner.trial_->take_log();
}

// ---------------------------------------------------------------------------

Session* SessionHub::find(const std::string& id) {
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second.get();
}

std::vector<SessionHub::Outbound> SessionHub::handle_message(ClientId client,
                                                             std::string_view text) {
  std::vector<Outbound> out;
  auto reply = [&](std::vector<std::string> frames) {
    for (std::string& f : frames) out.push_back({client, std::move(f)});
    return out;
  };
  if (const auto it = bound_.find(client); it != bound_.end()) {
    Session& session = *sessions_.at(it->second);
    auto frames = session.handle_message(client, text);
    if (!session.has_client(client)) bound_.erase(client);
    return reply(std::move(frames));
  }

  nlohmann::json msg;
  try {
    msg = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    return reply({error_json("bad_json", e.what()).dump()});
  }
  if (!msg.is_object()) return reply({error_json("bad_message", "expected a JSON object").dump()});
  const auto type = msg.find("type");
  if (type == msg.end() || !type->is_string()) {
    return reply({error_json("bad_type", "missing message type").dump()});
  }
  const std::string kind = type->get<std::string>();
  if (kind == "input" || kind == "leave") {
    return reply({error_json("not_joined", "join first").dump()});
  }
  if (kind != "join") {
    return reply({error_json("bad_type", "unknown message type '" + kind + "'").dump()});
  }

  const auto sid = msg.find("session");
  Session* session = nullptr;
  if (sid == msg.end() || sid->is_null() || (sid->is_string() && *sid == "new")) {
    SessionConfig config = defaults_;
    config.seed = defaults_.seed + opened_;
    const std::string id = "s" + std::to_string(opened_++);
    session = sessions_.emplace(id, std::make_unique<Session>(id, config))
                  .first->second.get();
  } else if (sid->is_string()) {
    session = find(sid->get<std::string>());
  }
  if (!session) return reply({error_json("unknown_session", "no such session").dump()});
  bound_[client] = session->id();
  return reply({session->join(client)});
}

void SessionHub::disconnect(ClientId client) {
  const auto it = bound_.find(client);
  if (it == bound_.end()) return;
  if (Session* s = find(it->second)) s->disconnect(client);
  bound_.erase(it);
}

std::vector<SessionHub::Outbound> SessionHub::tick_all() {
  std::vector<Outbound> out;
  for (auto& [id, session] : sessions_) {
    if (!session->running()) continue;
    const auto frames = session->tick();
    for (const auto& [client, sid] : bound_) {
      if (sid != id) continue;
      for (const std::string& f : frames) out.push_back({client, f});
    }
    if (session->finished() && out_dir) session->persist(*out_dir, "session_" + id);
  }
  return out;
}

}  // namespace proxsim
