#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "bistab/checkpoint.hpp"
#include "bistab/config.hpp"
#include "bistab/env.hpp"
#include "bistab/ppo.hpp"

namespace bistab::train {

struct CurvePoint {
  double million_steps = 0.0;
  double mean_episode_duration = 0.0;  // rolling mean over recent episodes (s)
};

struct TrainResult {
  std::vector<CurvePoint> curve;
  std::filesystem::path final_checkpoint;
  std::int64_t env_steps = 0;
  std::int64_t gradient_samples = 0;  // samples consumed by updates, post augmentation
  int episodes_completed = 0;
};

/// Full training run: parallel rollout workers, partial symmetric
/// augmentation, PPO updates, learning-curve CSV, periodic checkpoints.
/// Deterministic for a fixed (config, seed, worker count).
TrainResult run_train(const config::ExperimentConfig& cfg, std::uint64_t seed,
                      const std::filesystem::path& out_dir, bool write_outputs = true);

}  // namespace bistab::train
