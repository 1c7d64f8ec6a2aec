#include "proxsim/cli/dispatch.h"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "proxsim/analysis/anova.h"
#include "proxsim/analysis/hierarchical.h"
#include "proxsim/analysis/metrics.h"
#include "proxsim/analysis/report.h"
#include "proxsim/session/server.h"
#include "proxsim/sim/trial.h"

namespace proxsim {
namespace {

namespace fs = std::filesystem;

// Failure categories mapped onto exit codes.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DiagnosticsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options shared by commands that build trials.
struct ModelOptions {
  std::string scenario = "rejection";
  std::optional<double> psi_participant;
  double participant_vmax = TrialConfig{}.participant_phi.v_max;
  double robot_vmax = TrialConfig{}.robot_phi.v_max;
  double capture_radius = 0.8;
  double task_cap = 40.0;
  double pole_radius = 8.0;
  double field_half_width = 10.0;

  void add_to(CLI::App& app) {
    app.add_option("--scenario", scenario, "Participant preset: rejection or approach")
        ->check(CLI::IsMember({"rejection", "approach"}))
        ->capture_default_str();
    app.add_option("--psi-participant", psi_participant,
                   "Override the preset's consideration gain");
    app.add_option("--participant-vmax", participant_vmax, "m/s")->capture_default_str();
    app.add_option("--robot-vmax", robot_vmax, "m/s")->capture_default_str();
    app.add_option("--capture-radius", capture_radius, "m")->capture_default_str();
    app.add_option("--task-cap", task_cap, "seconds per task")->capture_default_str();
    app.add_option("--pole-radius", pole_radius, "m")->capture_default_str();
    app.add_option("--field-half-width", field_half_width, "m")->capture_default_str();
  }

  TrialConfig trial() const {
    TrialConfig tc;
    tc.preset = *parse_preset(scenario);
    tc.psi_participant = psi_participant;
    tc.participant_phi.v_max = participant_vmax;
    tc.robot_phi.v_max = robot_vmax;
    tc.capture_radius = capture_radius;
    tc.task_cap_seconds = task_cap;
    try {
      tc.layout = FieldLayout::standard(pole_radius, field_half_width);
      tc.layout.validate();
      tc.robot_phi.validate();
      tc.participant_phi.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (!(capture_radius > 0) || !(task_cap > 0)) {
      throw UsageError("capture radius and task cap must be positive");
    }
    return tc;
  }
};

Condition resolve_condition(const std::string& name, std::optional<double> psi,
                            bool random_walk) {
  const int given = !name.empty() + psi.has_value() + random_walk;
  if (given > 1) throw UsageError("give at most one of --condition, --psi-robot, --random-walk");
  if (random_walk) return Condition::kRandomWalk;
  if (psi) {
    if (const auto c = condition_for_psi(*psi)) return *c;
    throw UsageError("--psi-robot must be 0.001, 0.005 or 0.01");
  }
  if (name.empty()) return Condition::kPsi0001;
  if (const auto c = parse_condition(name)) return *c;
  throw UsageError("unknown condition '" + name + "'");
}

// Effective settings of the subcommand that ran, in a form --config accepts.
// Unset optional values are left out.
void write_resolved(const CLI::App& sub, const fs::path& dir) {
  std::ofstream out(dir / (sub.get_name() + ".resolved.toml"));
  if (!out) throw IoError("cannot write resolved config to " + dir.string());
  out << '[' << sub.get_name() << "]\n";
  std::istringstream lines(sub.config_to_str(true, false));
  for (std::string line; std::getline(lines, line);) {
    if (line.size() >= 3 && line.ends_with("=\"\"")) continue;
    out << line << '\n';
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<std::string> present_conditions(std::span<const TrajectoryLog> logs) {
  std::vector<std::string> out;
  for (Condition c : kAllConditions) {
    for (const TrajectoryLog& log : logs) {
      if (log.meta.condition == condition_name(c)) {
        out.push_back(condition_name(c));
        break;
      }
    }
  }
  for (const TrajectoryLog& log : logs) {
    if (std::find(out.begin(), out.end(), log.meta.condition) == out.end()) {
      out.push_back(log.meta.condition);
    }
  }
  return out;
}

struct LoadedRun {
  std::vector<TrajectoryLog> logs;
  std::vector<std::string> stems;
};

LoadedRun load_run(const fs::path& dir) {
  LoadedRun run;
  try {
    for (const ManifestEntry& e : read_manifest(dir)) {
      run.logs.push_back(read_log(dir, e.stem));
      run.stems.push_back(e.stem);
    }
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
  if (run.logs.empty()) throw IoError("manifest in " + dir.string() + " lists no logs");
  return run;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proximity-interaction simulator and analysis"};
  app.name("proxsim");
  app.set_config("--config", "", "TOML or INI file with one section per subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  // simulate
  ModelOptions sim_model;
  std::string sim_condition;
  std::optional<double> sim_psi;
  bool sim_rw = false;
  std::uint64_t sim_seed = 0;
  std::string sim_out = "runs";
  auto* simulate = app.add_subcommand("simulate", "Run one trial and write its log and trajectory CSV");
  sim_model.add_to(*simulate);
  simulate->add_option("--condition", sim_condition, "psi_0.001, psi_0.005, psi_0.01 or random_walk");
  simulate->add_option("--psi-robot", sim_psi, "Robot consideration gain");
  simulate->add_flag("--random-walk", sim_rw, "Random-walking robot");
  simulate->add_option("--seed", sim_seed)->capture_default_str();
  simulate->add_option("--out", sim_out, "Output directory")->envname("PROXSIM_OUT")->capture_default_str();

  // experiment
  ModelOptions exp_model;
  int exp_trials = 20;
  std::uint64_t exp_base = 100;
  unsigned exp_workers = 0;
  std::string exp_out = "runs";
  auto* experiment = app.add_subcommand("experiment", "All four conditions x N seeded trials");
  exp_model.add_to(*experiment);
  experiment->add_option("--trials", exp_trials, "Trials per condition")->check(CLI::PositiveNumber)->capture_default_str();
  experiment->add_option("--base-seed", exp_base)->capture_default_str();
  experiment->add_option("--workers", exp_workers, "0 = all cores")->capture_default_str();
  experiment->add_option("--out", exp_out)->envname("PROXSIM_OUT")->capture_default_str();

  // analyze
  std::string an_in = "runs";
  std::optional<std::string> an_out;
  std::string an_metric = "all";
  McmcConfig mcmc;
  PermutationConfig perm;
  bool strict = false;
  auto* analyze = app.add_subcommand("analyze", "Metrics CSV, ANOVA and posterior summaries from logs");
  analyze->add_option("--in", an_in, "Directory with manifest.json")->envname("PROXSIM_OUT")->capture_default_str();
  analyze->add_option("--out", an_out, "Defaults to --in");
  analyze->add_option("--metric", an_metric)->check(CLI::IsMember({"avoid", "movement", "all"}))->capture_default_str();
  analyze->add_option("--mcmc-chains", mcmc.chains)->check(CLI::PositiveNumber)->capture_default_str();
  analyze->add_option("--mcmc-length", mcmc.iterations, "Iterations per chain incl. burn-in")->check(CLI::PositiveNumber)->capture_default_str();
  analyze->add_option("--burn-in", mcmc.burn_in)->check(CLI::NonNegativeNumber)->capture_default_str();
  analyze->add_option("--mcmc-seed", mcmc.seed)->capture_default_str();
  analyze->add_option("--permutations", perm.permutations)->check(CLI::PositiveNumber)->capture_default_str();
  analyze->add_option("--perm-seed", perm.seed)->capture_default_str();
  analyze->add_flag("--strict", strict, "Exit 3 when any R-hat is flagged");

  // serve
  ServerOptions srv;
  std::string srv_condition = "psi_0.001";
  std::string srv_static;
  std::optional<std::string> srv_out;
  std::uint64_t srv_seed = 0;
  auto* serve = app.add_subcommand("serve", "Host interactive sessions over websockets");
  serve->add_option("--address", srv.address)->capture_default_str();
  serve->add_option("--port", srv.port)->capture_default_str();
  serve->add_option("--static", srv_static, "Directory of web client files");
  serve->add_option("--condition", srv_condition)->capture_default_str();
  serve->add_option("--seed", srv_seed, "Seed of the first session")->capture_default_str();
  serve->add_flag("--debug", srv.defaults.debug, "Internal states in state frames");
  serve->add_flag("--practice", srv.defaults.practice, "Stationary-robot practice before each trial");
  serve->add_option("--practice-tasks", srv.defaults.practice_tasks)->capture_default_str();
  serve->add_option("--out", srv_out, "Where completed session logs go")->envname("PROXSIM_OUT");

  // report
  std::string rep_in = "runs";
  auto* report = app.add_subcommand("report", "Summary table comparing conditions");
  report->add_option("--in", rep_in)->envname("PROXSIM_OUT")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "proxsim: " << e.what() << '\n';
    // A missing or unreadable config file is an I/O problem, not a usage one.
    return dynamic_cast<const CLI::FileError*>(&e) ? kExitIo : kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      const Condition c = resolve_condition(sim_condition, sim_psi, sim_rw);
      TrialConfig tc = sim_model.trial();
      tc.condition = c;
      const TrajectoryLog log = run_trial(tc, sim_seed);
      const fs::path dir = sim_out;
      ensure_dir(dir);
      const std::string stem = sim_model.scenario + "_" + log_stem(c, sim_seed);
      try {
        write_log(log, dir, stem);
        write_trajectory_csv(log, dir / (stem + ".trajectory.csv"));
      } catch (const std::exception& e) {
        throw IoError(e.what());
      }
      write_resolved(*simulate, dir);
      double sum = 0.0;
      int n = 0;
      for (const TaskRecord& rec : log.meta.tasks) {
        if (const auto av = compute_avoidance(log, rec.index)) {
          sum += av->a_void;
          ++n;
        }
      }
      out << stem << ": " << log.samples.size() << " samples, mean a_void "
          << (n ? fixed(sum / n) : "n/a") << '\n';
      return kExitOk;
    }

    if (experiment->parsed()) {
      const TrialConfig tc = exp_model.trial();
      const ExperimentResult result = run_experiment(tc, exp_trials, exp_base, exp_workers);
      const fs::path dir = exp_out;
      ensure_dir(dir);
      try {
        for (std::size_t i = 0; i < result.logs.size(); ++i) {
          write_log(result.logs[i], dir, result.manifest[i].stem);
        }
        write_manifest(result.manifest, dir);
      } catch (const std::exception& e) {
        throw IoError(e.what());
      }
      write_resolved(*experiment, dir);
      out << result.logs.size() << " logs written to " << dir.string() << '\n';
      return kExitOk;
    }

    if (analyze->parsed()) {
      if (mcmc.burn_in >= mcmc.iterations) throw UsageError("--burn-in must be below --mcmc-length");
      const LoadedRun run = load_run(an_in);
      const fs::path dir = an_out.value_or(an_in);
      ensure_dir(dir);
      const std::vector<MetricRow> rows = metric_rows(run.logs, run.stems);
      const std::vector<std::string> conditions = present_conditions(run.logs);
      try {
        write_text(dir / "metrics.csv", metrics_csv(rows));
      } catch (const std::exception& e) {
        throw IoError(e.what());
      }

      auto one_way = [&](const std::string& metric, const std::string& file) {
        const auto groups = trial_means_by_condition(rows, metric, conditions);
        std::vector<GroupSummary> summaries;
        std::vector<std::vector<double>> usable;
        std::vector<std::string> labels;
        for (std::size_t c = 0; c < conditions.size(); ++c) {
          summaries.push_back(summarize(conditions[c], groups[c]));
          if (groups[c].size() >= 2) {
            usable.push_back(groups[c]);
            labels.push_back(conditions[c]);
          }
        }
        if (usable.size() < 2) {
          err << "proxsim: " << metric << ": fewer than two conditions with n >= 2, no ANOVA\n";
          return;
        }
        const AnovaResult a = anova(usable);
        const auto pairs = pairwise_comparisons(labels, usable, perm);
        write_text(dir / file, anova_json(summaries, a, pairs, perm));
        out << metric << ": F(" << a.df_between << "," << a.df_within << ")="
            << fixed(a.F, 2) << " p=" << std::setprecision(3) << a.p
            << " f=" << fixed(a.cohens_f, 2) << '\n';
      };
      if (an_metric != "movement") one_way("a_void", "anova_a_void.json");
      if (an_metric != "avoid") one_way("path_length", "anova_movement.json");

      bool flagged = false;
      if (an_metric != "movement") {
        const HierarchicalData data = avoidance_trend_table(run.logs);
        PosteriorSummary post;
        try {
          post = fit_hierarchical(data, mcmc);
        } catch (const std::invalid_argument& e) {
          throw DiagnosticsError(std::string("trend model: ") + e.what());
        } catch (const std::runtime_error& e) {
          throw DiagnosticsError(std::string("trend model: ") + e.what());
        }
        write_text(dir / "posterior.json", posterior_json(post, mcmc, data.omitted));
        for (const ConditionPosterior& c : post.conditions) {
          out << c.condition << ": P(beta1>0)=" << fixed(c.p_beta1_positive) << '\n';
        }
        if (data.omitted > 0) {
          err << "proxsim: " << data.omitted << " pole tasks without an a_void value omitted\n";
        }
        if (post.flagged) {
          flagged = true;
          err << "proxsim: R-hat " << fixed(post.max_rhat, 4) << " exceeds "
              << mcmc.rhat_flag << '\n';
        }
      }
      write_resolved(*analyze, dir);
      return flagged && strict ? kExitDiagnostics : kExitOk;
    }

    if (serve->parsed()) {
      try {
        SessionConfig defaults = make_session_config(srv_condition, srv_seed);
        defaults.debug = srv.defaults.debug;
        defaults.practice = srv.defaults.practice;
        defaults.practice_tasks = srv.defaults.practice_tasks;
        srv.defaults = defaults;
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (!srv_static.empty()) srv.static_root = srv_static;
      if (srv_out) {
        ensure_dir(*srv_out);
        srv.out_dir = fs::path(*srv_out);
      }
      // Signals are taken synchronously on this thread while the server
      // runs on another.
      sigset_t signals;
      sigemptyset(&signals);
      sigaddset(&signals, SIGINT);
      sigaddset(&signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &signals, nullptr);
      std::unique_ptr<SessionServer> server;
      try {
        server = std::make_unique<SessionServer>(srv);
      } catch (const std::exception& e) {
        throw IoError(std::string("cannot listen: ") + e.what());
      }
      out << "listening on " << srv.address << ":" << server->port() << std::endl;
      std::thread loop([&] { server->run(); });
      int sig = 0;
      sigwait(&signals, &sig);
      server->stop();
      loop.join();
      return kExitOk;
    }

    if (report->parsed()) {
      const LoadedRun run = load_run(rep_in);
      const std::vector<MetricRow> rows = metric_rows(run.logs, run.stems);
      const std::vector<std::string> conditions = present_conditions(run.logs);
      const auto avoid = trial_means_by_condition(rows, "a_void", conditions);
      const auto moves = trial_means_by_condition(rows, "path_length", conditions);
      std::map<std::string, int> capped;
      for (const TrajectoryLog& log : run.logs) {
        for (const TaskRecord& r : log.meta.tasks) capped[log.meta.condition] += r.capped;
      }
      std::optional<nlohmann::json> posterior;
      if (std::ifstream in(fs::path(rep_in) / "posterior.json"); in) {
        try {
          posterior = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw IoError(std::string("malformed posterior.json: ") + e.what());
        }
      }
      out << std::left << std::setw(14) << "condition" << std::right << std::setw(7)
          << "trials" << std::setw(10) << "a_void" << std::setw(8) << "sd"
          << std::setw(10) << "move_m" << std::setw(8) << "sd" << std::setw(8)
          << "capped" << (posterior ? "  P(b1>0)" : "") << '\n';
      for (std::size_t c = 0; c < conditions.size(); ++c) {
        const GroupSummary a = summarize(conditions[c], avoid[c]);
        const GroupSummary m = summarize(conditions[c], moves[c]);
        out << std::left << std::setw(14) << conditions[c] << std::right << std::setw(7)
            << std::max(a.n, m.n) << std::setw(10) << fixed(a.mean) << std::setw(8)
            << fixed(a.sd) << std::setw(10) << fixed(m.mean, 2) << std::setw(8)
            << fixed(m.sd, 2) << std::setw(8) << capped[conditions[c]];
        if (posterior) {
          std::string p = "-";
          for (const auto& pc : posterior->value("conditions", nlohmann::json::array())) {
            if (pc.value("condition", "") == conditions[c]) {
              p = fixed(pc.value("p_beta1_positive", 0.0));
            }
          }
          out << std::setw(9) << p;
        }
        out << '\n';
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "proxsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DiagnosticsError& e) {
    err << "proxsim: " << e.what() << '\n';
    return kExitDiagnostics;
  } catch (const IoError& e) {
    err << "proxsim: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "proxsim: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "proxsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "proxsim: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace proxsim
