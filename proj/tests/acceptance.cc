// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Optional arguments select criteria by id substring.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "proxsim/analysis/anova.h"
#include "proxsim/analysis/hierarchical.h"
#include "proxsim/analysis/metrics.h"
#include "proxsim/analysis/report.h"
#include "proxsim/core/behavior.h"
#include "proxsim/core/dynamics.h"
#include "proxsim/core/estimator.h"
#include "proxsim/session/session.h"
#include "proxsim/sim/trial.h"
#include "session_driver.h"
#include "test_util.h"

namespace proxsim {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  double limit_seconds;  // infinity when no runtime bound applies
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- ANOVA on published summaries -----------------------------------------------

Outcome anova_avoid() {
  const std::vector<GroupSummary> g = {{"psi_0.001", 11, 0.29, 0.04},
                                       {"psi_0.005", 16, 0.22, 0.06},
                                       {"psi_0.01", 14, 0.21, 0.06},
                                       {"random_walk", 13, 0.20, 0.08}};
  const AnovaResult r = anova_from_summaries(g);
  const bool ok = r.df_between == 3 && r.df_within == 50 && r.F >= 4.5 && r.F <= 5.6 &&
                  r.cohens_f >= 0.52 && r.cohens_f <= 0.58 && r.p < 0.01;
  return {ok, fmt("F(%d,%d)=%.3f in [4.5,5.6], f=%.3f in [0.52,0.58], p=%.4g < 0.01",
                  r.df_between, r.df_within, r.F, r.cohens_f, r.p)};
}

Outcome anova_movement() {
  const std::vector<GroupSummary> g = {{"psi_0.001", 11, 6.15, 2.23},
                                       {"psi_0.005", 16, 7.04, 1.73},
                                       {"psi_0.01", 14, 7.51, 1.55},
                                       {"random_walk", 13, 23.29, 12.24}};
  const AnovaResult r = anova_from_summaries(g);
  const bool ok = r.df_between == 3 && r.df_within == 50 && r.F >= 19 && r.F <= 24 &&
                  r.cohens_f >= 1.10 && r.cohens_f <= 1.20;
  return {ok, fmt("F(%d,%d)=%.3f in [19,24], f=%.3f in [1.10,1.20]", r.df_between,
                  r.df_within, r.F, r.cohens_f)};
}

// ---- simulation reproductions -----------------------------------------------------

constexpr std::uint64_t kBaseSeed = 100;
constexpr int kTrials = 20;

const ExperimentResult& rejecting_runs() {
  static const ExperimentResult runs = [] {
    TrialConfig tc;
    tc.preset = ParticipantPreset::kRejecting;
    return run_experiment(tc, kTrials, kBaseSeed);
  }();
  return runs;
}

std::vector<std::string> condition_names() {
  std::vector<std::string> names;
  for (Condition c : kAllConditions) names.push_back(condition_name(c));
  return names;
}

std::vector<std::vector<double>> trial_means(const ExperimentResult& runs,
                                             const std::string& metric) {
  std::vector<std::string> stems;
  for (const ManifestEntry& e : runs.manifest) stems.push_back(e.stem);
  const auto rows = metric_rows(runs.logs, stems);
  return trial_means_by_condition(rows, metric, condition_names());
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / v.size();
}

Outcome h1_avoidance() {
  const auto groups = trial_means(rejecting_runs(), "a_void");
  const auto names = condition_names();
  const auto pairs = pairwise_comparisons(names, groups, {10000, 1});
  bool ok = true;
  std::string detail = "means";
  for (std::size_t c = 0; c < groups.size(); ++c) {
    detail += fmt(" %s=%.3f", names[c].c_str(), mean(groups[c]));
    if (c > 0) ok = ok && mean(groups[0]) > mean(groups[c]);
  }
  detail += "; Holm p(0.001 vs .)";
  for (const PairwiseResult& p : pairs) {
    if (p.a != names[0]) continue;
    const double adj = p.p_adjusted.value_or(1.0);
    ok = ok && adj < 0.05;
    detail += fmt(" %s=%.4f", p.b.c_str(), adj);
  }
  return {ok, detail};
}

Outcome h3_movement() {
  TrialConfig tc;
  tc.preset = ParticipantPreset::kApproaching;
  const ExperimentResult runs = run_experiment(tc, kTrials, kBaseSeed);
  const auto groups = trial_means(runs, "path_length");
  const double rw = mean(groups[3]);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (int c = 0; c < 3; ++c) {
    lo = std::min(lo, mean(groups[c]));
    hi = std::max(hi, mean(groups[c]));
  }
  const bool ok = rw >= 2 * hi && hi <= 1.25 * lo;
  return {ok, fmt("object path m: 0.001=%.2f 0.005=%.2f 0.01=%.2f RW=%.2f; RW/max model=%.2f "
                  ">= 2, model max/min=%.3f <= 1.25",
                  mean(groups[0]), mean(groups[1]), mean(groups[2]), rw, rw / hi, hi / lo)};
}

Outcome breakoff_order() {
  const ExperimentResult& runs = rejecting_runs();
  auto first_negative = [&](Condition c, int trial) {
    for (std::size_t i = 0; i < runs.manifest.size(); ++i) {
      const ManifestEntry& e = runs.manifest[i];
      if (e.condition != condition_name(c) || e.trial != trial) continue;
      for (const Sample& s : runs.logs[i].samples) {
        if (s.agents[kRobot].s.c < 0) return s.tick;
      }
    }
    return std::numeric_limits<std::int64_t>::max();
  };
  constexpr auto kNever = std::numeric_limits<std::int64_t>::max();
  int ordered = 0;
  std::array<int, 3> crossed{};
  for (int t = 0; t < kTrials; ++t) {
    const auto fast = first_negative(Condition::kPsi001, t);
    const auto mid = first_negative(Condition::kPsi0005, t);
    const auto slow = first_negative(Condition::kPsi0001, t);
    ordered += fast <= mid && mid <= slow;
    crossed[0] += fast != kNever;
    crossed[1] += mid != kNever;
    crossed[2] += slow != kNever;
  }
  // A condition that never crosses within the trial ranks last.
  const bool ok = ordered >= 18;
  return {ok, fmt("ordered in %d/%d seeds (need >= 18); crossed c<0: psi_0.01 %d, psi_0.005 %d, "
                  "psi_0.001 %d of %d",
                  ordered, kTrials, crossed[0], crossed[1], crossed[2], kTrials)};
}

// ---- hierarchical trend recovery ----------------------------------------------------

Outcome h2_trend() {
  SyntheticTrendSpec spec;
  spec.conditions = {{"positive", 30, 0.25, 0.01},
                     {"null_a", 30, 0.25, 0.0},
                     {"null_b", 30, 0.25, 0.0},
                     {"null_c", 30, 0.25, 0.0}};
  spec.antithetic = true;
  const HierarchicalData data = synthetic_trend_data(spec, 2024);
  McmcConfig cfg;  // 4 chains x 10,000, burn-in 5,000
  const PosteriorSummary post = fit_hierarchical(data, cfg);
  bool ok = post.chains == 4 && post.iterations == 10000 && post.burn_in == 5000 &&
            post.max_rhat < 1.05;
  std::string detail;
  for (const ConditionPosterior& c : post.conditions) {
    const double p = c.p_beta1_positive;
    ok = ok && (c.condition == "positive" ? p >= 0.9 : (p >= 0.2 && p <= 0.8));
    detail += fmt("P(b1>0)[%s]=%.3f ", c.condition.c_str(), p);
  }
  detail += fmt("max R-hat=%.4f, %d draws", post.max_rhat, post.retained_draws);
  return {ok, detail};
}

// ---- estimator round trip ----------------------------------------------------------

Outcome estimator_round_trip() {
  struct Geometry { double r, theta12, offset; };
  const std::vector<Geometry> geometries = {{3.0, kPi / 3, kPi / 3},
                                            {2.0, kPi / 2, 2 * kPi / 3},
                                            {6.0, kPi / 4, kPi / 2},
                                            {1.8, 2 * kPi / 3, kPi / 4},
                                            {3.5, 0.2, 2.5}};
  const BehaviorParams phi;
  const CognitiveParams cog;
  const auto axis = grid_axis(cog.grid_n);
  int checked = 0, recovered = 0, still = 0;
  for (const Geometry& g : geometries) {
    const Pose self{{0, 0}, g.theta12};
    const Pose other{{g.r, 0}, wrap_angle(kPi + g.offset)};
    for (double c : axis) {
      for (double a : axis) {
        Pose moved = other;
        for (int t = 0; t < cog.window; ++t) {
          moved = step_kinematics(moved, behavior_field(moved, self, {c, a}, phi), kTickSeconds);
        }
        const Observation obs = observe(self, other, moved, cog.window);
        if (obs.other_speed < cog.eps_v) {
          ++still;
          continue;
        }
        ++checked;
        const EstimatedState est = estimate_internal(obs, phi, cog, {});
        recovered += est.informative && est.s_hat == InternalState{c, a};
      }
    }
  }
  return {checked > 0 && recovered == checked,
          fmt("%d/%d moving states recovered exactly (%d of %zu below eps_v skipped)", recovered,
              checked, still, geometries.size() * axis.size() * axis.size())};
}

// ---- dynamics ----------------------------------------------------------------------------

Outcome dynamics_properties() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  int cases = 0;
  bool ok = true;
  for (double psi : {0.001, 0.005, 0.01, -0.005, 0.0}) {
    CognitiveParams cog;
    cog.psi = psi;
    for (int rep = 0; rep < 50; ++rep) {
      InternalState s{u(rng), u(rng)};
      const EstimatedState other{{u(rng), u(rng)}, 1.0, true};
      for (int t = 0; t < 2000; ++t, ++cases) {
        const InternalState next = update_internal(s, other, cog);
        const double want_c = std::clamp(other.s_hat.a - (1 - psi) * (other.s_hat.a - s.c), -1.0, 1.0);
        const double want_a = std::clamp(other.s_hat.c - (1 - psi) * (other.s_hat.c - s.a), -1.0, 1.0);
        if (psi == 0.0) {
          ok = ok && next == s;
        } else {
          worst = std::max({worst, std::abs(next.c - want_c), std::abs(next.a - want_a)});
        }
        s = next;
      }
      if (psi < 0) {
        // Divergence ends on the boundary of the square.
        ok = ok && std::abs(s.c) == 1.0 && std::abs(s.a) == 1.0;
      }
    }
  }
  ok = ok && worst <= 1e-12;
  return {ok, fmt("%d updates, max deviation from (1-psi) gap law %.2e <= 1e-12; psi=0 exact; "
                  "psi=-0.005 ends clamped", cases, worst)};
}

// ---- a_void unit suite -------------------------------------------------------------------

Outcome avoidance_suite() {
  const double min_step = 0.05 * kTickSeconds;
  const Vec2 pole{8, 0};
  std::vector<Vec2> line{{-4, 3}};
  const Vec2 dir = (pole - line[0]) * (1.0 / (pole - line[0]).norm());
  for (int t = 0; t < 200; ++t) line.push_back(line.back() + dir * 0.04);
  const double straight = avoidance_of_path(line, pole, min_step)->a_void;

  std::vector<Vec2> spiral{{9, 4}};
  for (int t = 0; t < 300; ++t) {
    const Vec2 p = spiral.back();
    spiral.push_back(p + unit_from_angle(std::atan2(pole.y - p.y, pole.x - p.x) + kPi / 6) * 0.04);
  }
  const double thirty = avoidance_of_path(spiral, pole, min_step)->a_void;

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  bool bounded = true;
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<Vec2> path{{5 * u(rng), 5 * u(rng)}};
    for (int t = 0; t < 80; ++t) path.push_back(path.back() + Vec2{0.07 * u(rng), 0.07 * u(rng)});
    const Vec2 target{9 * u(rng), 9 * u(rng)};
    const auto base = avoidance_of_path(path, target, min_step);
    if (!base) continue;
    for (const double g : base->gaps) bounded = bounded && g >= 0 && g <= 1;
    bounded = bounded && base->a_void >= 0 && base->a_void <= 1;
    const double th = kPi * u(rng);
    const Vec2 d{40 * u(rng), 40 * u(rng)};
    auto move = [&](Vec2 p) {
      return Vec2{std::cos(th) * p.x - std::sin(th) * p.y + d.x,
                  std::sin(th) * p.x + std::cos(th) * p.y + d.y};
    };
    std::vector<Vec2> moved;
    for (const Vec2& p : path) moved.push_back(move(p));
    worst = std::max(worst, std::abs(avoidance_of_path(moved, move(target), min_step)->a_void -
                                     base->a_void));
  }
  const bool ok = std::abs(straight) < 1e-12 && std::abs(thirty - 0.5) < 1e-12 && bounded &&
                  worst <= 1e-9;
  return {ok, fmt("straight=%.2e, 30deg=%.12f, bounded=%s, rigid-motion max diff %.2e <= 1e-9",
                  straight, thirty, bounded ? "yes" : "no", worst)};
}

// ---- replay determinism ------------------------------------------------------------------

Outcome replay_determinism() {
  int identical = 0, total = 0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> jitter(-0.6, 0.6);
  for (Condition c : kAllConditions) {
    for (bool practice : {false, true}) {
      SessionConfig config = make_session_config(condition_name(c), 500 + total);
      config.practice = practice;
      config.practice_tasks = 2;
      Session session("s", config);
      session.join(1);
      long long seq = 0;
      auto frames = session.tick();
      while (!session.finished()) {
        // A wobbly client with occasional silence and stale messages.
        const long long k = ++seq;
        if (k % 7 != 0) {
          auto msg = nlohmann::json::parse(test::steer_message(frames.front(), k));
          msg["move"][0] = msg["move"][0].get<double>() + jitter(rng);
          msg["move"][1] = msg["move"][1].get<double>() + jitter(rng);
          session.handle_message(1, msg.dump());
        }
        if (k % 11 == 0) {
          session.handle_message(1, nlohmann::json{{"type", "input"}, {"seq", k - 3}, {"move", {1, 1}}}.dump());
        }
        frames = session.tick();
      }
      const test::TempDir dir;
      session.persist(dir.path(), "live");
      const auto trace = input_trace_from_json(test::slurp(dir.path() / "live.inputs.json"));
      write_log(replay_session(config, trace), dir.path(), "replay");
      bool same = true;
      for (const char* ext : {".meta.json", ".jsonl"}) {
        same = same && test::slurp(dir.path() / (std::string("live") + ext)) ==
                           test::slurp(dir.path() / (std::string("replay") + ext));
      }
      identical += same;
      ++total;
    }
  }
  return {identical == total,
          fmt("%d/%d sessions (4 conditions, with and without practice) byte-identical on replay",
              identical, total)};
}

}  // namespace
}  // namespace proxsim

int main(int argc, char** argv) {
  using namespace proxsim;
  constexpr double kNone = std::numeric_limits<double>::infinity();
  const std::vector<Criterion> criteria = {
      {"anova-avoid", 1, anova_avoid},
      {"anova-movement", 1, anova_movement},
      {"h1-avoidance", 120, h1_avoidance},
      {"h3-movement", 120, h3_movement},
      {"h2-trend-recovery", 300, h2_trend},
      {"estimator-round-trip", 30, estimator_round_trip},
      {"dynamics", kNone, dynamics_properties},
      {"breakoff-order", kNone, breakoff_order},
      {"a-void-suite", kNone, avoidance_suite},
      {"replay-determinism", kNone, replay_determinism},
  };
  int failed = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (argc > 1 && std::none_of(argv + 1, argv + argc, [&](const char* f) {
          return c.id.find(f) != std::string::npos;
        })) {
      continue;
    }
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::string timing = std::isinf(c.limit_seconds)
                             ? fmt("%.2fs", secs)
                             : fmt("%.2fs < %.0fs%s", secs, c.limit_seconds, in_time ? "" : " EXCEEDED");
    std::printf("%s %-22s %s [%s]\n", pass ? "PASS" : "FAIL", c.id.c_str(), o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
