#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bistab/env.hpp"
#include "bistab/ppo.hpp"
#include "bistab/symmetry.hpp"

namespace bistab::config {

struct EvalParams {
  int episodes = 1000;
  int noise_episodes = 50;
  double noise_episode_cap = 120.0;  // s, per-episode cap during noise sweeps
  double drift_duration = 500.0;     // s
  double drift_sample_period = 5.0;  // s
  int radial_trials = 10;
  double radial_threshold = 0.5;
  double radial_settle_time = 1.5;   // s of walking before the probe push
  double radial_observe_time = 3.0;  // s after the push to count as recovered
  double radial_max_force = 3000.0;  // N, probe ceiling
};

struct ExperimentConfig {
  gait::GaitConfig gait;
  control::ControlParams control;
  plant::PlantParams plant;
  plant::ScenarioSpec scenario;
  ppo::TrainConfig train;
  EvalParams eval;
  symmetry::MirrorSpec mirror = symmetry::MirrorSpec::reduced_plant();

  static ExperimentConfig defaults() { return ExperimentConfig{}; }
};

/// Parses the JSON configuration file. Missing keys take defaults; unknown
/// keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

std::string canonical_json(const ExperimentConfig& cfg);

/// FNV-1a over the canonical serialization; recorded in every CSV artifact.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Accepts the ratio tokens 0, 1/8, 1/4, 1/2, 1.
double parse_ratio(const std::string& token);

plant::ScenarioKind parse_scenario_kind(const std::string& name);
std::string scenario_kind_name(plant::ScenarioKind kind);

env::Environment::Options make_env_options(const ExperimentConfig& cfg, bool eval_mode,
                                           double obs_noise = 1.0);

}  // namespace bistab::config
