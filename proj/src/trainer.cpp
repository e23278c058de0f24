#include "bistab/trainer.hpp"

#include <deque>
#include <memory>
#include <optional>
#include <thread>

#include "bistab/csv.hpp"
#include "bistab/policy.hpp"

namespace bistab::train {

namespace {

using env::Environment;
using plant::Observation;
using plant::Termination;

/// Steps of one episode collected within one rollout window.
struct EpisodeChunk {
  std::vector<Eigen::VectorXd> obs;
  std::vector<Eigen::VectorXd> act;
  std::vector<double> rewards;
  std::vector<double> values;
  bool terminal = false;       // episode ended by falling
  double bootstrap = 0.0;      // critic value of the follow-up state otherwise
  double completed_duration = -1.0;  // episode length (s) when it ended here
};

/// One worker owns one environment and its action stream across the run.
struct Worker {
  std::unique_ptr<Environment> environment;
  Rng action_rng{0};
  Observation current_obs;

  // Per-batch output.
  std::vector<EpisodeChunk> chunks;
  symmetry::SharedNormStats local_stats{plant::kObservationDim};
};

double value_of(const policy::PolicyParams& params, const symmetry::SharedNormStats& stats,
                const Observation& obs) {
  return policy::policy_forward(params, stats.normalize(obs)).value[0];
}

void rollout(Worker& w, const policy::PolicyParams& params,
             const symmetry::SharedNormStats& stats_snapshot, const symmetry::MirrorSpec& mirror,
             const policy::ActionBounds& bounds, int steps) {
  w.chunks.clear();
  w.chunks.emplace_back();
  w.local_stats = symmetry::SharedNormStats(plant::kObservationDim);

  for (int i = 0; i < steps; ++i) {
    w.local_stats.update(w.current_obs, mirror);
    const Eigen::VectorXd obs_norm = stats_snapshot.normalize(w.current_obs);
    const policy::ForwardResult fwd = policy::policy_forward(params, obs_norm);
    double logp = 0.0;
    const Eigen::VectorXd action =
        policy::sample_action(params, fwd.mean.col(0), w.action_rng, &logp);

    const auto result = w.environment->step(policy::to_residual_action(action, bounds));

    EpisodeChunk& chunk = w.chunks.back();
    chunk.obs.push_back(w.current_obs);
    chunk.act.push_back(action);
    chunk.rewards.push_back(result.reward);
    chunk.values.push_back(fwd.value[0]);

    if (result.status == Termination::fell) {
      chunk.terminal = true;
      chunk.completed_duration = w.environment->time();
      w.current_obs = w.environment->reset();
      w.chunks.emplace_back();
    } else if (result.status == Termination::timeout) {
      chunk.terminal = false;
      chunk.bootstrap = value_of(params, stats_snapshot, result.obs);
      chunk.completed_duration = w.environment->time();
      w.current_obs = w.environment->reset();
      w.chunks.emplace_back();
    } else {
      w.current_obs = result.obs;
    }
  }

  // Close the trailing chunk with a truncation bootstrap.
  EpisodeChunk& last = w.chunks.back();
  if (last.obs.empty()) {
    w.chunks.pop_back();
  } else {
    last.terminal = false;
    last.bootstrap = value_of(params, stats_snapshot, w.current_obs);
  }
}

}  // namespace

TrainResult run_train(const config::ExperimentConfig& cfg, std::uint64_t seed,
                      const std::filesystem::path& out_dir, bool write_outputs) {
  const ppo::TrainConfig& tc = cfg.train;
  tc.validate();
  const std::uint64_t hash = config::config_hash(cfg);

  Rng master(seed);
  Rng init_rng = master.fork(0xA11CE);
  const policy::ActionBounds bounds =
      policy::reduced_plant_bounds(cfg.control.saturation, cfg.control.default_gains);
  policy::PolicyParams params = policy::make_policy(
      plant::kObservationDim, 12, tc.hidden, 8, bounds, init_rng, tc.log_std_init);
  ppo::PpoLearner learner(std::move(params), tc);
  Rng shuffle_rng = master.fork(0x5B0F);

  symmetry::SharedNormStats stats(plant::kObservationDim);

  std::vector<Worker> workers(tc.n_envs);
  for (int i = 0; i < tc.n_envs; ++i) {
    workers[i].environment = std::make_unique<Environment>(
        config::make_env_options(cfg, /*eval_mode=*/false), master.fork(0xE000 + i).seed());
    workers[i].action_rng = master.fork(0xAC00 + i);
    workers[i].current_obs = workers[i].environment->reset();
  }

  std::optional<csv::Writer> curve_csv;
  if (write_outputs) {
    std::filesystem::create_directories(out_dir);
    curve_csv.emplace(out_dir / "learning_curve.csv", hash, seed,
                      std::vector<std::string>{"million_steps", "mean_episode_duration_s"});
  }

  TrainResult result;
  std::deque<double> recent_durations;
  const int steps_per_env = tc.batch_size / tc.n_envs;
  std::int64_t steps_done = 0;
  std::int64_t next_checkpoint = tc.checkpoint_every;

  while (steps_done < tc.total_steps) {
    // Rollout phase: workers run independently against a frozen parameter
    // and statistics snapshot; results merge in worker order.
    {
      std::vector<std::thread> threads;
      threads.reserve(workers.size());
      for (auto& w : workers)
        threads.emplace_back([&] {
          rollout(w, learner.params(), stats, cfg.mirror, bounds, steps_per_env);
        });
      for (auto& t : threads) t.join();
    }

    std::vector<symmetry::Sample> batch;
    batch.reserve(static_cast<std::size_t>(tc.batch_size) * 2);
    for (auto& w : workers) {
      stats.merge(w.local_stats);
      for (const auto& chunk : w.chunks) {
        const Eigen::Index n = static_cast<Eigen::Index>(chunk.obs.size());
        Eigen::VectorXd rewards = Eigen::Map<const Eigen::VectorXd>(chunk.rewards.data(), n);
        Eigen::VectorXd values = Eigen::Map<const Eigen::VectorXd>(chunk.values.data(), n);
        const Eigen::VectorXd adv = ppo::gae_advantages(rewards, values, chunk.terminal,
                                                        chunk.bootstrap, tc.gamma, tc.lam);
        const Eigen::VectorXd vtgt = ppo::lambda_returns(adv, values);
        for (Eigen::Index t = 0; t < n; ++t) {
          symmetry::Sample s;
          s.obs = chunk.obs[t];
          s.act = chunk.act[t];
          s.advantage = adv[t];
          s.value_target = vtgt[t];
          batch.push_back(std::move(s));
        }
        if (chunk.completed_duration >= 0.0) {
          recent_durations.push_back(chunk.completed_duration);
          if (recent_durations.size() > 100) recent_durations.pop_front();
          ++result.episodes_completed;
        }
      }
    }

    const auto augmented = symmetry::augment_batch(batch, tc.symmetry_ratio, cfg.mirror);
    learner.update(augmented, stats, steps_done, shuffle_rng);
    result.gradient_samples += static_cast<std::int64_t>(augmented.size());
    steps_done += tc.batch_size;

    double rolling = 0.0;
    for (const double d : recent_durations) rolling += d;
    rolling = recent_durations.empty() ? 0.0 : rolling / static_cast<double>(recent_durations.size());
    result.curve.push_back({static_cast<double>(steps_done) / 1e6, rolling});
    if (curve_csv)
      curve_csv->row({csv::format_double(result.curve.back().million_steps),
                      csv::format_double(rolling)});

    if (write_outputs && steps_done >= next_checkpoint && steps_done < tc.total_steps) {
      checkpoint::Checkpoint ckpt{learner.params(), stats, seed, steps_done};
      char name[64];
      std::snprintf(name, sizeof(name), "ckpt_%06.2fM.bin",
                    static_cast<double>(steps_done) / 1e6);
      checkpoint::save_checkpoint(ckpt, out_dir / name);
      next_checkpoint += tc.checkpoint_every;
    }
  }

  result.env_steps = steps_done;
  if (write_outputs) {
    checkpoint::Checkpoint ckpt{learner.params(), stats, seed, steps_done};
    result.final_checkpoint = out_dir / "ckpt_final.bin";
    checkpoint::save_checkpoint(ckpt, result.final_checkpoint);
  }
  return result;
}

}  // namespace bistab::train
