#include "proxsim/sim/trajectory_log.h"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace proxsim {
namespace {

using Json = nlohmann::ordered_json;

Json vec_to_json(const Vec2& v) { return Json::array({v.x, v.y}); }

Vec2 vec_from_json(const Json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

Json agent_to_json(const AgentSample& a) {
  Json j;
  j["id"] = a.id;
  j["x"] = a.pose.position.x;
  j["y"] = a.pose.position.y;
  j["heading"] = a.pose.heading;
  j["c"] = a.s.c;
  j["a"] = a.s.a;
  j["c_hat"] = a.estimate.s_hat.c;
  j["a_hat"] = a.estimate.s_hat.a;
  j["score"] = a.estimate.score;
  j["informative"] = a.estimate.informative;
  return j;
}

AgentSample agent_from_json(const Json& j) {
  AgentSample a;
  a.id = j.at("id").get<std::string>();
  a.pose.position = {j.at("x").get<double>(), j.at("y").get<double>()};
  a.pose.heading = j.at("heading").get<double>();
  a.s = {j.at("c").get<double>(), j.at("a").get<double>()};
  a.estimate.s_hat = {j.at("c_hat").get<double>(), j.at("a_hat").get<double>()};
  a.estimate.score = j.at("score").get<double>();
  a.estimate.informative = j.at("informative").get<bool>();
  return a;
}

}  // namespace

std::vector<const Sample*> TrajectoryLog::task_samples(int task) const {
  std::vector<const Sample*> out;
  for (const Sample& s : samples) {
    if (s.task == task) out.push_back(&s);
  }
  return out;
}

std::string meta_to_json(const LogMeta& meta) {
  Json j;
  j["condition"] = meta.condition;
  j["psi_robot"] = meta.psi_robot ? Json(*meta.psi_robot) : Json(nullptr);
  j["psi_participant"] = meta.psi_participant;
  j["participant"] = meta.participant;
  j["seed"] = meta.seed;
  j["tick_seconds"] = meta.tick_seconds;
  j["capture_radius"] = meta.capture_radius;
  j["eps_v"] = meta.eps_v;
  Json layout;
  layout["poles"] = Json::array();
  for (const Vec2& p : meta.layout.poles) layout["poles"].push_back(vec_to_json(p));
  layout["robot_home"] = vec_to_json(meta.layout.robot_home);
  layout["bounds"] = Json::array(
      {vec_to_json(meta.layout.bounds.min), vec_to_json(meta.layout.bounds.max)});
  j["layout"] = layout;
  j["schedule"] = Json::array();
  for (const Target& t : meta.schedule.entries) j["schedule"].push_back(t.id());
  j["tasks"] = Json::array();
  for (const TaskRecord& t : meta.tasks) {
    Json tj;
    tj["index"] = t.index;
    tj["target"] = t.target.id();
    tj["first_tick"] = t.first_tick;
    tj["last_tick"] = t.last_tick;
    tj["completed"] = t.completed;
    tj["capped"] = t.capped;
    j["tasks"].push_back(tj);
  }
  return j.dump(2);
}

LogMeta meta_from_json(const std::string& text) {
  const Json j = Json::parse(text);
  LogMeta meta;
  meta.condition = j.at("condition").get<std::string>();
  if (!j.at("psi_robot").is_null()) meta.psi_robot = j["psi_robot"].get<double>();
  meta.psi_participant = j.at("psi_participant").get<double>();
  meta.participant = j.at("participant").get<std::string>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.tick_seconds = j.at("tick_seconds").get<double>();
  meta.capture_radius = j.at("capture_radius").get<double>();
  meta.eps_v = j.at("eps_v").get<double>();
  const Json& layout = j.at("layout");
  const Json& poles = layout.at("poles");
  if (poles.size() != kNumPoles) throw std::runtime_error("layout needs 6 poles");
  for (int i = 0; i < kNumPoles; ++i) meta.layout.poles[i] = vec_from_json(poles[i]);
  meta.layout.robot_home = vec_from_json(layout.at("robot_home"));
  meta.layout.bounds = {vec_from_json(layout.at("bounds").at(0)),
                        vec_from_json(layout.at("bounds").at(1))};
  for (const Json& t : j.at("schedule")) {
    meta.schedule.entries.push_back(Target::parse(t.get<std::string>()));
  }
  for (const Json& tj : j.at("tasks")) {
    TaskRecord t;
    t.index = tj.at("index").get<int>();
    t.target = Target::parse(tj.at("target").get<std::string>());
    t.first_tick = tj.at("first_tick").get<std::int64_t>();
    t.last_tick = tj.at("last_tick").get<std::int64_t>();
    t.completed = tj.at("completed").get<bool>();
    t.capped = tj.at("capped").get<bool>();
    meta.tasks.push_back(t);
  }
  return meta;
}

std::string sample_to_json(const Sample& sample) {
  Json j;
  j["tick"] = sample.tick;
  j["task"] = sample.task;
  j["target"] = sample.target.id();
  j["agents"] = Json::array();
  for (const AgentSample& a : sample.agents) j["agents"].push_back(agent_to_json(a));
  j["task_complete"] = sample.task_complete;
  j["task_capped"] = sample.task_capped;
  return j.dump();
}

Sample sample_from_json(const std::string& text) {
  const Json j = Json::parse(text);
  Sample s;
  s.tick = j.at("tick").get<std::int64_t>();
  s.task = j.at("task").get<int>();
  s.target = Target::parse(j.at("target").get<std::string>());
  const Json& agents = j.at("agents");
  if (agents.size() != 2) throw std::runtime_error("sample needs two agents");
  s.agents = {agent_from_json(agents[0]), agent_from_json(agents[1])};
  s.task_complete = j.at("task_complete").get<bool>();
  s.task_capped = j.at("task_capped").get<bool>();
  return s;
}

void write_log(const TrajectoryLog& log, const std::filesystem::path& dir,
               const std::string& stem) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream meta(dir / (stem + ".meta.json"));
    if (!meta) throw std::runtime_error("cannot write " + stem + ".meta.json");
    meta << meta_to_json(log.meta) << '\n';
  }
  std::ofstream lines(dir / (stem + ".jsonl"));
  if (!lines) throw std::runtime_error("cannot write " + stem + ".jsonl");
  for (const Sample& s : log.samples) lines << sample_to_json(s) << '\n';
  if (!lines) throw std::runtime_error("write failed for " + stem + ".jsonl");
}

TrajectoryLog read_log(const std::filesystem::path& dir,
                       const std::string& stem) {
  TrajectoryLog log;
  std::ifstream meta(dir / (stem + ".meta.json"));
  if (!meta) throw std::runtime_error("cannot read " + stem + ".meta.json");
  const std::string text((std::istreambuf_iterator<char>(meta)),
                         std::istreambuf_iterator<char>());
  try {
    log.meta = meta_from_json(text);
    std::ifstream lines(dir / (stem + ".jsonl"));
    if (!lines) throw std::runtime_error("cannot read " + stem + ".jsonl");
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty()) log.samples.push_back(sample_from_json(line));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed log " + stem + ": " + e.what());
  }
  return log;
}

void write_trajectory_csv(const TrajectoryLog& log,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "task,tick,t,agent,x,y,heading\n";
  for (const Sample& s : log.samples) {
    for (const AgentSample& a : s.agents) {
      out << s.task << ',' << s.tick << ',' << s.tick * log.meta.tick_seconds
          << ',' << a.id << ',' << a.pose.position.x << ','
          << a.pose.position.y << ',' << a.pose.heading << '\n';
    }
  }
}

}  // namespace proxsim
