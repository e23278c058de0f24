#include "bistab/evalrunner.hpp"

#include <cmath>

#include "bistab/csv.hpp"
#include "bistab/policy.hpp"
#include "bistab/symmetry.hpp"

namespace bistab::eval {

using env::Environment;
using plant::Observation;
using plant::Termination;

PolicyActor::PolicyActor(checkpoint::Checkpoint ckpt) : ckpt_(std::move(ckpt)) {}

Eigen::VectorXd PolicyActor::action_vector(const Observation& obs) const {
  const Eigen::VectorXd norm = ckpt_.stats.normalize(obs);
  return policy::policy_forward(ckpt_.params, norm).mean.col(0);
}

control::ResidualAction PolicyActor::act(const Observation& obs) const {
  return policy::to_residual_action(action_vector(obs), ckpt_.params.bounds);
}

std::unique_ptr<Actor> make_actor(const config::ExperimentConfig& cfg,
                                  const std::optional<std::filesystem::path>& ckpt_path) {
  if (!ckpt_path) return std::make_unique<BaselineActor>(cfg.control);
  auto ckpt = checkpoint::load_checkpoint_checked(*ckpt_path, plant::kObservationDim, 12);
  return std::make_unique<PolicyActor>(std::move(ckpt));
}

namespace {

struct EpisodeOutcome {
  double duration = 0.0;
  double mean_nni = 0.0;
  double msi = 0.0;
  bool fell = false;
};

/// Runs one episode to termination, accumulating NNI and (optionally) the
/// per-step mirrored symmetry index of the deterministic residuals.
EpisodeOutcome run_episode(Environment& env, const Actor& actor,
                           const symmetry::MirrorSpec& mirror, bool compute_msi) {
  Observation obs = env.reset();
  EpisodeOutcome out;
  double nni_sum = 0.0, msi_sum = 0.0;
  std::int64_t steps = 0;

  while (true) {
    if (compute_msi) {
      const Eigen::VectorXd a = actor.action_vector(obs);
      const Eigen::VectorXd a_mirror =
          symmetry::mirror_action(actor.action_vector(symmetry::mirror_state(obs, mirror)), mirror);
      msi_sum += symmetry::msi(a.head(8), a_mirror.head(8));
    }
    const control::ResidualAction action = actor.act(obs);
    const auto result = env.step(action);
    nni_sum += env.nni(action);
    ++steps;
    obs = result.obs;
    if (result.status != Termination::alive) {
      out.fell = result.status == Termination::fell;
      break;
    }
  }
  out.duration = env.time();
  out.mean_nni = actor.is_baseline() ? 0.0 : nni_sum / static_cast<double>(steps);
  out.msi = compute_msi ? msi_sum / static_cast<double>(steps) : 0.0;
  return out;
}

}  // namespace

EvalReport run_eval(const config::ExperimentConfig& cfg, const Actor& actor,
                    plant::ScenarioKind kind, int episodes, std::uint64_t seed,
                    const std::optional<std::filesystem::path>& csv_path) {
  config::ExperimentConfig run_cfg = cfg;
  run_cfg.scenario = plant::ScenarioSpec::preset(kind);
  run_cfg.scenario.train_episode_cap = cfg.scenario.train_episode_cap;
  run_cfg.scenario.eval_episode_cap = cfg.scenario.eval_episode_cap;

  Environment env(config::make_env_options(run_cfg, /*eval_mode=*/true), seed);
  EvalReport report;
  report.episodes = episodes;
  double dur = 0.0, nni = 0.0, msi = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const auto out = run_episode(env, actor, cfg.mirror, /*compute_msi=*/!actor.is_baseline());
    dur += out.duration;
    nni += out.mean_nni;
    msi += out.msi;
  }
  report.mean_duration = dur / episodes;
  report.mean_nni = nni / episodes;
  report.mean_msi = msi / episodes;

  if (csv_path) {
    csv::Writer w(*csv_path, config::config_hash(run_cfg), seed,
                  {"scenario", "episodes", "mean_duration_s", "mean_nni", "mean_msi"});
    w.row({config::scenario_kind_name(kind), std::to_string(episodes),
           csv::format_double(report.mean_duration), csv::format_double(report.mean_nni),
           csv::format_double(report.mean_msi)});
  }
  return report;
}

namespace {

/// One radial probe: settle into the gait, apply a single push, observe.
bool radial_trial(const config::ExperimentConfig& cfg, const Actor& actor, double force,
                  double direction_rad, int trial, std::uint64_t seed) {
  Environment env(config::make_env_options(cfg, /*eval_mode=*/true), Rng(seed).fork(trial).seed());
  Observation obs = env.reset();

  // Stagger the push over the step cycle so "consistently" covers the gait
  // phase, not one lucky instant.
  const double settle = cfg.eval.radial_settle_time +
                        cfg.gait.step_duration * static_cast<double>(trial) /
                            std::max(1, cfg.eval.radial_trials);
  plant::PushEvent push;
  push.t_start = settle;
  push.duration = cfg.scenario.push_duration;
  push.force = force;
  push.direction = Eigen::Vector2d(std::cos(direction_rad), std::sin(direction_rad));
  env.add_push(push);

  const double horizon = settle + push.duration + cfg.eval.radial_observe_time;
  while (env.time() < horizon) {
    const auto result = env.step(actor.act(obs));
    obs = result.obs;
    if (result.status == Termination::fell) return false;
    if (result.status == Termination::timeout) break;
  }
  return true;
}

double radial_recovery_rate(const config::ExperimentConfig& cfg, const Actor& actor, double force,
                            double direction_rad, std::uint64_t seed) {
  int recovered = 0;
  for (int trial = 0; trial < cfg.eval.radial_trials; ++trial)
    if (radial_trial(cfg, actor, force, direction_rad, trial, seed)) ++recovered;
  return static_cast<double>(recovered) / cfg.eval.radial_trials;
}

}  // namespace

std::vector<RadialPoint> run_radial(const config::ExperimentConfig& cfg, const Actor& actor,
                                    std::uint64_t seed,
                                    const std::optional<std::filesystem::path>& csv_path) {
  config::ExperimentConfig probe_cfg = cfg;
  probe_cfg.scenario.pushes_enabled = false;  // only the probe push acts

  constexpr int kDirections = 24;
  std::vector<RadialPoint> points;
  points.reserve(kDirections);
  for (int d = 0; d < kDirections; ++d) {
    const double deg = 15.0 * d;
    const double rad = deg * M_PI / 180.0;
    const std::uint64_t dir_seed = Rng(seed).fork(1000 + d).seed();

    auto rate = [&](double force) {
      return radial_recovery_rate(probe_cfg, actor, force, rad, dir_seed);
    };

    // Grow until failure, then bisect to ~10 N.
    double lo = 0.0, hi = 200.0;
    while (hi < cfg.eval.radial_max_force && rate(hi) >= cfg.eval.radial_threshold) {
      lo = hi;
      hi *= 1.5;
    }
    if (hi >= cfg.eval.radial_max_force) {
      lo = cfg.eval.radial_max_force;
    } else {
      while (hi - lo > 10.0) {
        const double mid = 0.5 * (lo + hi);
        (rate(mid) >= cfg.eval.radial_threshold ? lo : hi) = mid;
      }
    }
    points.push_back({deg, lo});
  }

  if (csv_path) {
    csv::Writer w(*csv_path, config::config_hash(cfg), seed, {"direction_deg", "max_force_n"});
    for (const auto& p : points)
      w.row({csv::format_double(p.direction_deg), csv::format_double(p.max_force)});
  }
  return points;
}

DriftResult run_drift(const config::ExperimentConfig& cfg, const Actor& actor, double duration,
                      std::uint64_t seed,
                      const std::optional<std::filesystem::path>& csv_path) {
  config::ExperimentConfig drift_cfg = cfg;
  drift_cfg.scenario = plant::ScenarioSpec::preset(plant::ScenarioKind::l1_flat);
  drift_cfg.scenario.pushes_enabled = false;
  drift_cfg.scenario.eval_episode_cap = duration;

  Environment env(config::make_env_options(drift_cfg, /*eval_mode=*/true), seed);
  Observation obs = env.reset();

  DriftResult result;
  auto robot_pos = [&] {
    return Eigen::Vector2d(
        0.5 * (env.state().support_pos.head<2>() + env.state().swing_pos.head<2>()));
  };
  Eigen::Vector2d last = robot_pos();
  result.samples.push_back({0.0, last.x(), last.y(), 0.0});

  double next_sample = cfg.eval.drift_sample_period;
  while (true) {
    const auto step = env.step(actor.act(obs));
    obs = step.obs;
    if (env.time() + 1e-9 >= next_sample) {
      const Eigen::Vector2d pos = robot_pos();
      result.total_distance += (pos - last).norm();
      last = pos;
      result.samples.push_back({env.time(), pos.x(), pos.y(), result.total_distance});
      next_sample += cfg.eval.drift_sample_period;
    }
    if (step.status == Termination::fell) {
      result.fell = true;
      break;
    }
    if (step.status == Termination::timeout) break;
  }

  if (csv_path) {
    csv::Writer w(*csv_path, config::config_hash(drift_cfg), seed,
                  {"t_s", "x_m", "y_m", "cumulative_distance_m"});
    for (const auto& s : result.samples)
      w.row({csv::format_double(s.t), csv::format_double(s.x), csv::format_double(s.y),
             csv::format_double(s.cumulative_distance)});
    w.comment("fell=" + std::to_string(result.fell ? 1 : 0));
    w.comment("total_distance_m=" + csv::format_double(result.total_distance));
  }
  return result;
}

std::vector<NoisePoint> run_noise_sweep(const config::ExperimentConfig& cfg, const Actor& actor,
                                        plant::ScenarioKind kind, std::uint64_t seed,
                                        const std::optional<std::filesystem::path>& csv_path) {
  config::ExperimentConfig noise_cfg = cfg;
  noise_cfg.scenario = plant::ScenarioSpec::preset(kind);
  // Fixed push cadence across the sweep.
  noise_cfg.scenario.push_interval = Eigen::Vector2d(3.5, 3.5);
  noise_cfg.scenario.eval_episode_cap = cfg.eval.noise_episode_cap;

  std::vector<NoisePoint> points;
  for (int i = 0; i <= 8; ++i) {
    const double n_max = 1.0 + 0.05 * i;
    Environment env(config::make_env_options(noise_cfg, /*eval_mode=*/true, n_max), seed);
    double total = 0.0;
    for (int e = 0; e < cfg.eval.noise_episodes; ++e)
      total += run_episode(env, actor, cfg.mirror, /*compute_msi=*/false).duration;
    points.push_back({(n_max - 1.0) * 100.0, total / cfg.eval.noise_episodes});
  }

  if (csv_path) {
    csv::Writer w(*csv_path, config::config_hash(noise_cfg), seed,
                  {"noise_pct", "mean_duration_s"});
    for (const auto& p : points)
      w.row({csv::format_double(p.noise_pct), csv::format_double(p.mean_duration)});
  }
  return points;
}

}  // namespace bistab::eval
