#pragma once

#include <optional>
#include <vector>

#include "bistab/control.hpp"
#include "bistab/gait.hpp"
#include "bistab/plant.hpp"
#include "bistab/rng.hpp"

namespace bistab::env {

using control::ActuationCommand;
using control::ControlParams;
using control::ResidualAction;
using gait::GaitConfig;
using gait::GaitPlan;
using plant::Observation;
using plant::PlantParams;
using plant::PlantState;
using plant::ScenarioSpec;
using plant::Termination;

/// One closed-loop walking episode: online planner + tracking controller +
/// reduced-order plant, with scenario disturbances. A single instance is
/// owned by one worker; independent instances are freely concurrent.
class Environment {
 public:
  struct Options {
    GaitConfig gait;
    ScenarioSpec scenario;
    ControlParams control;
    PlantParams plant;
    bool eval_mode = false;
    double obs_noise = 1.0;  // multiplicative noise cap N; 1 disables
  };

  Environment(const Options& options, std::uint64_t seed);

  Observation reset();

  struct StepResult {
    Observation obs;
    double reward = 0.0;
    Termination status = Termination::alive;
    bool stepped = false;  // a support swap happened this cycle
  };

  /// One control cycle: merge residuals, hold the command over the physics
  /// substeps, handle step swaps and replanning.
  StepResult step(const ResidualAction& residual);

  ResidualAction baseline_action() const {
    return ResidualAction(options_.control.default_gains);
  }

  double nni(const ResidualAction& residual) const;
  double episode_cap() const;

  const PlantState& state() const { return state_; }
  const GaitPlan& plan() const { return *plan_; }
  const ActuationCommand& last_command() const { return last_cmd_; }
  const Options& options() const { return options_; }
  double time() const { return state_.time; }

  /// Drops the plant into an arbitrary state and replans from it (test and
  /// probe hook; treats the state's step phase as authoritative).
  void teleport(const PlantState& s);

  /// Adds an extra scheduled push (radial-force probes).
  void add_push(const plant::PushEvent& e) { pushes_.push_back(e); }

 private:
  void rebuild_plan();
  void on_step_swap(const Eigen::Vector3d& old_support);
  Eigen::Vector2d external_accel(double t_lo, double t_hi);
  Observation observe();

  Options options_;
  Rng master_;
  std::uint64_t episode_index_ = 0;

  Rng push_rng_{0}, terrain_rng_{0}, tilt_rng_{0}, noise_rng_{0};

  PlantState state_;
  std::optional<GaitPlan> plan_;
  Eigen::Vector2d committed_c0_ = Eigen::Vector2d::Zero();
  Eigen::Vector3d swing_liftoff_ = Eigen::Vector3d::Zero();
  double step_start_time_ = 0.0;
  std::optional<Eigen::Vector2d> landing_override_;
  double commanded_T_ = 0.0;
  double landing_terrain_ = 0.0;

  std::vector<plant::PushEvent> pushes_;
  Eigen::Vector2d tilt_from_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d tilt_to_ = Eigen::Vector2d::Zero();
  double tilt_t0_ = 0.0;

  ActuationCommand last_cmd_;
};

}  // namespace bistab::env
