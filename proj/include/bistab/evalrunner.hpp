#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "bistab/checkpoint.hpp"
#include "bistab/config.hpp"
#include "bistab/env.hpp"

namespace bistab::eval {

/// Deterministic acting policy used by every evaluation protocol.
class Actor {
 public:
  virtual ~Actor() = default;
  virtual control::ResidualAction act(const plant::Observation& obs) const = 0;
  /// Full action vector (residuals + gains); mirrored-symmetry probes need it.
  virtual Eigen::VectorXd action_vector(const plant::Observation& obs) const = 0;
  virtual bool is_baseline() const { return false; }
};

/// Pure analytical controller: zero residuals, expert gains.
class BaselineActor : public Actor {
 public:
  explicit BaselineActor(const control::ControlParams& params) : params_(params) {}
  control::ResidualAction act(const plant::Observation&) const override {
    return control::ResidualAction(params_.default_gains);
  }
  Eigen::VectorXd action_vector(const plant::Observation&) const override {
    return Eigen::VectorXd::Zero(12);
  }
  bool is_baseline() const override { return true; }

 private:
  control::ControlParams params_;
};

/// Trained policy acting through its deterministic mean.
class PolicyActor : public Actor {
 public:
  explicit PolicyActor(checkpoint::Checkpoint ckpt);
  control::ResidualAction act(const plant::Observation& obs) const override;
  Eigen::VectorXd action_vector(const plant::Observation& obs) const override;

 private:
  checkpoint::Checkpoint ckpt_;
};

std::unique_ptr<Actor> make_actor(const config::ExperimentConfig& cfg,
                                  const std::optional<std::filesystem::path>& ckpt_path);

struct EvalReport {
  double mean_duration = 0.0;  // s
  double mean_nni = 0.0;
  double mean_msi = 0.0;
  int episodes = 0;
};

/// Deterministic-policy evaluation over seeded episodes; reports mean
/// episode duration, neural-network influence, and trajectory MSI.
EvalReport run_eval(const config::ExperimentConfig& cfg, const Actor& actor,
                    plant::ScenarioKind kind, int episodes, std::uint64_t seed,
                    const std::optional<std::filesystem::path>& csv_path = std::nullopt);

struct RadialPoint {
  double direction_deg = 0.0;
  double max_force = 0.0;
};

/// Maximum single push the policy recovers from consistently, per direction
/// (24 directions at 15 degree spacing).
std::vector<RadialPoint> run_radial(const config::ExperimentConfig& cfg, const Actor& actor,
                                    std::uint64_t seed,
                                    const std::optional<std::filesystem::path>& csv_path =
                                        std::nullopt);

struct DriftResult {
  struct Sample {
    double t, x, y, cumulative_distance;
  };
  std::vector<Sample> samples;  // every drift_sample_period seconds
  double total_distance = 0.0;
  bool fell = false;
};

/// Position drift while walking in place with pushes disabled on flat
/// ground. The robot position is the feet midpoint.
DriftResult run_drift(const config::ExperimentConfig& cfg, const Actor& actor, double duration,
                      std::uint64_t seed,
                      const std::optional<std::filesystem::path>& csv_path = std::nullopt);

struct NoisePoint {
  double noise_pct = 0.0;
  double mean_duration = 0.0;
};

/// Mean episode duration as a function of the multiplicative observation
/// noise cap, with pushes at a fixed interval.
std::vector<NoisePoint> run_noise_sweep(const config::ExperimentConfig& cfg, const Actor& actor,
                                        plant::ScenarioKind kind, std::uint64_t seed,
                                        const std::optional<std::filesystem::path>& csv_path =
                                            std::nullopt);

}  // namespace bistab::eval
