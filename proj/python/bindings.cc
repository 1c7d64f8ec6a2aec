#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "proxsim/analysis/anova.h"
#include "proxsim/analysis/hierarchical.h"
#include "proxsim/analysis/metrics.h"
#include "proxsim/core/behavior.h"
#include "proxsim/core/dynamics.h"
#include "proxsim/core/estimator.h"
#include "proxsim/sim/trial.h"

namespace py = pybind11;
using namespace proxsim;

namespace {

std::vector<std::pair<double, double>> agent_path(const TrajectoryLog& log, int agent) {
  if (agent < 0 || agent > 1) throw py::index_error("agent must be 0 (robot) or 1 (participant)");
  std::vector<std::pair<double, double>> out;
  out.reserve(log.samples.size());
  for (const Sample& s : log.samples) {
    const Vec2& p = s.agents[agent].pose.position;
    out.emplace_back(p.x, p.y);
  }
  return out;
}

Condition condition_from(const std::string& name) {
  const auto c = parse_condition(name);
  if (!c) throw py::value_error("unknown condition: " + name);
  return *c;
}

}  // namespace

PYBIND11_MODULE(_proxsim, m) {
  m.doc() = "Proxemic interaction simulator: model, simulation and analysis";

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("__repr__", [](const Vec2& v) {
        return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
      });

  py::class_<Pose>(m, "Pose")
      .def(py::init([](double x, double y, double heading) { return Pose{{x, y}, heading}; }),
           py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("heading") = 0.0)
      .def_readwrite("position", &Pose::position)
      .def_readwrite("heading", &Pose::heading);

  py::class_<InternalState>(m, "InternalState")
      .def(py::init<double, double>(), py::arg("c") = 0.0, py::arg("a") = 0.0)
      .def_readwrite("c", &InternalState::c)
      .def_readwrite("a", &InternalState::a)
      .def("__eq__", [](const InternalState& x, const InternalState& y) { return x == y; })
      .def("__repr__", [](const InternalState& s) {
        return "InternalState(c=" + std::to_string(s.c) + ", a=" + std::to_string(s.a) + ")";
      });

  py::class_<BehaviorParams>(m, "BehaviorParams")
      .def(py::init<>())
      .def_readwrite("v_max", &BehaviorParams::v_max)
      .def_readwrite("omega_max", &BehaviorParams::omega_max)
      .def_readwrite("r_int", &BehaviorParams::r_int)
      .def_readwrite("r_rep", &BehaviorParams::r_rep)
      .def_readwrite("s_r", &BehaviorParams::s_r)
      .def("validate", &BehaviorParams::validate);

  py::class_<CognitiveParams>(m, "CognitiveParams")
      .def(py::init<>())
      .def_readwrite("psi", &CognitiveParams::psi)
      .def_readwrite("grid_n", &CognitiveParams::grid_n)
      .def_readwrite("window", &CognitiveParams::window)
      .def_readwrite("eps_v", &CognitiveParams::eps_v)
      .def("validate", &CognitiveParams::validate);

  py::class_<EstimatedState>(m, "EstimatedState")
      .def(py::init<>())
      .def(py::init([](InternalState s, double score, bool informative) {
             return EstimatedState{s, score, informative};
           }),
           py::arg("s_hat"), py::arg("score") = 1.0, py::arg("informative") = true)
      .def_readwrite("s_hat", &EstimatedState::s_hat)
      .def_readwrite("score", &EstimatedState::score)
      .def_readwrite("informative", &EstimatedState::informative);

  py::class_<MotionCommand>(m, "MotionCommand")
      .def_readonly("speed", &MotionCommand::speed)
      .def_readonly("turn_rate", &MotionCommand::turn_rate)
      .def_readonly("move_bearing", &MotionCommand::move_bearing);

  py::class_<Observation>(m, "Observation")
      .def_readonly("other_speed", &Observation::other_speed);

  m.def("behavior_field", &behavior_field, py::arg("self"), py::arg("other"), py::arg("s"),
        py::arg("phi") = BehaviorParams{});
  m.def("step_kinematics",
        py::overload_cast<const Pose&, const MotionCommand&, double>(&step_kinematics),
        py::arg("pose"), py::arg("command"), py::arg("dt") = kTickSeconds);
  m.def("observe", &observe, py::arg("self"), py::arg("other_before"), py::arg("other_after"),
        py::arg("window"));
  m.def("estimate_internal", &estimate_internal, py::arg("observation"),
        py::arg("phi_hat") = BehaviorParams{}, py::arg("cog") = CognitiveParams{},
        py::arg("prev") = EstimatedState{});
  m.def("update_internal", &update_internal, py::arg("s"), py::arg("other"), py::arg("cog"));
  m.def("grid_axis", &grid_axis, py::arg("grid_n") = 21);

  py::class_<TrajectoryLog>(m, "TrajectoryLog")
      .def_property_readonly("condition", [](const TrajectoryLog& l) { return l.meta.condition; })
      .def_property_readonly("seed", [](const TrajectoryLog& l) { return l.meta.seed; })
      .def_property_readonly("tick_count", [](const TrajectoryLog& l) { return l.samples.size(); })
      .def_property_readonly("task_count", [](const TrajectoryLog& l) { return l.meta.tasks.size(); })
      .def("task_is_pole",
           [](const TrajectoryLog& l, int k) { return l.meta.schedule.entries.at(k).is_pole(); })
      .def("task_completed", [](const TrajectoryLog& l, int k) { return l.meta.tasks.at(k).completed; })
      .def("path", &agent_path, py::arg("agent"),
           "Positions of agent 0 (robot) or 1 (participant) for every tick.")
      .def("robot_control", [](const TrajectoryLog& l) {
        std::vector<double> c;
        for (const Sample& s : l.samples) c.push_back(s.agents[kRobot].s.c);
        return c;
      })
      .def("a_void", [](const TrajectoryLog& l, int k) -> std::optional<double> {
        const auto av = compute_avoidance(l, k);
        return av ? std::optional<double>(av->a_void) : std::nullopt;
      })
      .def("path_length", &compute_path_length)
      .def("write", &write_log, py::arg("dir"), py::arg("stem"));

  m.def("read_log", &read_log, py::arg("dir"), py::arg("stem"));
  m.def(
      "run_trial",
      [](const std::string& condition, std::uint64_t seed, const std::string& preset,
         std::optional<double> psi_participant) {
        TrialConfig tc;
        tc.condition = condition_from(condition);
        const auto p = parse_preset(preset);
        if (!p) throw py::value_error("unknown participant preset: " + preset);
        tc.preset = *p;
        tc.psi_participant = psi_participant;
        py::gil_scoped_release release;
        return run_trial(tc, seed);
      },
      py::arg("condition"), py::arg("seed"), py::arg("preset") = "rejecting",
      py::arg("psi_participant") = py::none());
  m.def("conditions", [] {
    std::vector<std::string> out;
    for (Condition c : kAllConditions) out.push_back(condition_name(c));
    return out;
  });

  m.def("avoidance_of_path",
        [](const std::vector<std::pair<double, double>>& path, std::pair<double, double> target,
           double min_step) -> std::optional<double> {
          std::vector<Vec2> pts;
          for (const auto& [x, y] : path) pts.push_back({x, y});
          const auto av = avoidance_of_path(pts, {target.first, target.second}, min_step);
          return av ? std::optional<double>(av->a_void) : std::nullopt;
        },
        py::arg("path"), py::arg("target"), py::arg("min_step") = 0.0);

  py::class_<GroupSummary>(m, "GroupSummary")
      .def(py::init([](std::string label, int n, double mean, double sd) {
             return GroupSummary{std::move(label), n, mean, sd};
           }),
           py::arg("label"), py::arg("n"), py::arg("mean"), py::arg("sd"))
      .def_readonly("label", &GroupSummary::label)
      .def_readonly("n", &GroupSummary::n)
      .def_readonly("mean", &GroupSummary::mean)
      .def_readonly("sd", &GroupSummary::sd);

  py::class_<AnovaResult>(m, "AnovaResult")
      .def_readonly("F", &AnovaResult::F)
      .def_readonly("df_between", &AnovaResult::df_between)
      .def_readonly("df_within", &AnovaResult::df_within)
      .def_readonly("p", &AnovaResult::p)
      .def_readonly("cohens_f", &AnovaResult::cohens_f);

  py::class_<PairwiseResult>(m, "PairwiseResult")
      .def_readonly("a", &PairwiseResult::a)
      .def_readonly("b", &PairwiseResult::b)
      .def_readonly("mean_diff", &PairwiseResult::mean_diff)
      .def_readonly("p", &PairwiseResult::p)
      .def_readonly("p_adjusted", &PairwiseResult::p_adjusted);

  m.def("anova_from_summaries", [](const std::vector<GroupSummary>& g) {
    return anova_from_summaries(g);
  });
  m.def("anova", [](const std::vector<std::vector<double>>& g) { return anova(g); });
  m.def("f_survival", &f_survival, py::arg("f"), py::arg("d1"), py::arg("d2"));
  m.def("holm_adjust", [](const std::vector<double>& p) { return holm_adjust(p); });
  m.def(
      "pairwise_comparisons",
      [](const std::vector<std::string>& labels, const std::vector<std::vector<double>>& groups,
         int permutations, std::uint64_t seed) {
        return pairwise_comparisons(labels, groups, {permutations, seed});
      },
      py::arg("labels"), py::arg("groups"), py::arg("permutations") = 10000, py::arg("seed") = 0);

  py::class_<ParamSummary>(m, "ParamSummary")
      .def_readonly("name", &ParamSummary::name)
      .def_readonly("mean", &ParamSummary::mean)
      .def_readonly("sd", &ParamSummary::sd)
      .def_readonly("ci95_lo", &ParamSummary::ci95_lo)
      .def_readonly("ci95_hi", &ParamSummary::ci95_hi)
      .def_readonly("rhat", &ParamSummary::rhat);

  py::class_<ConditionPosterior>(m, "ConditionPosterior")
      .def_readonly("condition", &ConditionPosterior::condition)
      .def_readonly("trials", &ConditionPosterior::trials)
      .def_readonly("mu0", &ConditionPosterior::mu0)
      .def_readonly("mu1", &ConditionPosterior::mu1)
      .def_readonly("p_beta1_positive", &ConditionPosterior::p_beta1_positive);

  py::class_<PosteriorSummary>(m, "PosteriorSummary")
      .def_readonly("conditions", &PosteriorSummary::conditions)
      .def_readonly("max_rhat", &PosteriorSummary::max_rhat)
      .def_readonly("flagged", &PosteriorSummary::flagged)
      .def_readonly("retained_draws", &PosteriorSummary::retained_draws);

  py::class_<HierarchicalData>(m, "HierarchicalData")
      .def_property_readonly("size", [](const HierarchicalData& d) { return d.records.size(); });

  m.def(
      "synthetic_trend_data",
      [](const std::vector<std::pair<std::string, double>>& conditions, int trials, int movements,
         bool antithetic, std::uint64_t seed) {
        SyntheticTrendSpec spec;
        for (const auto& [label, mu1] : conditions) {
          spec.conditions.push_back({label, trials, 0.25, mu1});
        }
        spec.movements = movements;
        spec.antithetic = antithetic;
        return synthetic_trend_data(spec, seed);
      },
      py::arg("conditions"), py::arg("trials") = 30, py::arg("movements") = 8,
      py::arg("antithetic") = true, py::arg("seed") = 1);
  m.def("avoidance_trend_table",
        [](const std::vector<TrajectoryLog>& logs) { return avoidance_trend_table(logs); });
  m.def(
      "fit_hierarchical",
      [](const HierarchicalData& data, int chains, int iterations, int burn_in,
         std::uint64_t seed) {
        McmcConfig cfg;
        cfg.chains = chains;
        cfg.iterations = iterations;
        cfg.burn_in = burn_in;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return fit_hierarchical(data, cfg);
      },
      py::arg("data"), py::arg("chains") = 4, py::arg("iterations") = 10000,
      py::arg("burn_in") = 5000, py::arg("seed") = 1);
}
