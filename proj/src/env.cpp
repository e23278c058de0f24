#include "bistab/env.hpp"

#include <algorithm>
#include <cmath>

namespace bistab::env {

namespace {
constexpr std::uint64_t kPushStream = 1;
constexpr std::uint64_t kTerrainStream = 2;
constexpr std::uint64_t kTiltStream = 3;
constexpr std::uint64_t kNoiseStream = 4;
constexpr std::uint64_t kStreamsPerEpisode = 8;
}  // namespace

Environment::Environment(const Options& options, std::uint64_t seed)
    : options_(options), master_(seed) {
  options_.gait.validate();
  options_.scenario.validate();
  reset();
}

double Environment::episode_cap() const {
  return options_.eval_mode ? options_.scenario.eval_episode_cap
                            : options_.scenario.train_episode_cap;
}

Observation Environment::reset() {
  const std::uint64_t base = episode_index_ * kStreamsPerEpisode;
  ++episode_index_;
  push_rng_ = master_.fork(base + kPushStream);
  terrain_rng_ = master_.fork(base + kTerrainStream);
  tilt_rng_ = master_.fork(base + kTiltStream);
  noise_rng_ = master_.fork(base + kNoiseStream);

  const double half_y = 0.5 * options_.gait.stride_y;
  state_ = PlantState{};
  state_.support_side = gait::Side::right;
  state_.support_pos = Eigen::Vector3d(0.0, -half_y, 0.0);
  state_.swing_pos = Eigen::Vector3d(0.0, half_y, 0.0);
  state_.c = Eigen::Vector3d(0.0, 0.0, options_.gait.com_height);
  state_.zmp = state_.support_pos.head<2>();

  committed_c0_ = Eigen::Vector2d::Zero();
  swing_liftoff_ = state_.swing_pos;
  step_start_time_ = 0.0;
  landing_override_.reset();
  commanded_T_ = options_.gait.step_duration;
  rebuild_plan();

  // Start on the reference.
  state_.c.head<2>() = plan_->com_ref(0.0);
  state_.c_dot.head<2>() = plan_->com_ref_dot(0.0);

  pushes_ = options_.scenario.pushes_enabled
                ? plant::schedule_pushes(push_rng_, options_.scenario.push_interval,
                                         options_.scenario.push_force,
                                         options_.scenario.push_duration, episode_cap())
                : std::vector<plant::PushEvent>{};
  landing_terrain_ = plant::sample_terrain(terrain_rng_, options_.scenario.terrain_amplitude);

  tilt_from_ = Eigen::Vector2d::Zero();
  tilt_t0_ = 0.0;
  tilt_to_ = options_.scenario.kind == plant::ScenarioKind::t1_tilt
                 ? plant::platform_tilt(tilt_rng_, state_.c.head<2>(), options_.scenario)
                 : Eigen::Vector2d::Zero();

  last_cmd_ = ActuationCommand{};
  return observe();
}

void Environment::rebuild_plan() {
  GaitPlan::Anchor anchor;
  anchor.support_pos = state_.support_pos;
  anchor.support_side = state_.support_side;
  anchor.swing_pos = swing_liftoff_;
  anchor.com_start = committed_c0_;
  anchor.t_start = step_start_time_;
  anchor.landing_override = landing_override_;
  anchor.duration_override = commanded_T_;
  plan_.emplace(options_.gait, anchor);
}

void Environment::on_step_swap(const Eigen::Vector3d& old_support) {
  // Commit the reference boundary: the finished segment ended at the midpoint
  // of the old support and the realized landing.
  committed_c0_ = 0.5 * (old_support.head<2>() + state_.support_pos.head<2>());
  swing_liftoff_ = state_.swing_pos;
  step_start_time_ = state_.time;
  landing_override_.reset();
  landing_terrain_ = plant::sample_terrain(terrain_rng_, options_.scenario.terrain_amplitude);
  rebuild_plan();
}

Eigen::Vector2d Environment::external_accel(double t_lo, double t_hi) {
  Eigen::Vector2d accel = Eigen::Vector2d::Zero();
  const double dt = t_hi - t_lo;
  for (const auto& e : pushes_) {
    const double lo = std::max(t_lo, e.t_start);
    const double hi = std::min(t_hi, e.t_start + e.duration);
    if (hi > lo) accel += (e.force * (hi - lo) / dt / options_.plant.mass) * e.direction;
  }
  if (options_.scenario.kind == plant::ScenarioKind::t1_tilt) {
    while (t_lo >= tilt_t0_ + options_.scenario.tilt_resample) {
      tilt_t0_ += options_.scenario.tilt_resample;
      tilt_from_ = tilt_to_;
      tilt_to_ = plant::platform_tilt(tilt_rng_, state_.c.head<2>(), options_.scenario);
    }
    const double s = std::clamp((t_lo - tilt_t0_) / options_.scenario.tilt_resample, 0.0, 1.0);
    const Eigen::Vector2d tilt = tilt_from_ + s * (tilt_to_ - tilt_from_);
    accel += plant::tilt_gravity_bias(tilt, options_.plant.gravity);
  }
  return accel;
}

Observation Environment::observe() {
  Observation obs = plant::build_observation(state_, commanded_T_);
  if (options_.obs_noise > 1.0) obs = plant::apply_obs_noise(obs, options_.obs_noise, noise_rng_);
  return obs;
}

double Environment::nni(const ResidualAction& residual) const {
  return (residual.delta.cwiseAbs().cwiseQuotient(options_.control.saturation.s)).mean();
}

Environment::StepResult Environment::step(const ResidualAction& residual) {
  // Saturation is enforced on entry so the reward stays in [0, 1].
  ResidualAction r = residual;
  r.delta = r.delta.cwiseMax(-options_.control.saturation.s).cwiseMin(options_.control.saturation.s);

  const double commanded_T =
      std::clamp(options_.gait.step_duration + r.delta[control::kStepTime],
                 options_.control.min_step_time, options_.control.max_step_time);
  if (commanded_T != commanded_T_ ||
      landing_override_.has_value() != plan_->anchor().landing_override.has_value() ||
      (landing_override_ && plan_->anchor().landing_override &&
       *landing_override_ != *plan_->anchor().landing_override)) {
    commanded_T_ = commanded_T;
    rebuild_plan();
  }

  const double height = std::max(state_.pendulum_height(), options_.plant.min_pendulum_height);
  lip::PendulumModel model(options_.plant.gravity, height);

  control::ControlInputs in;
  in.com = state_.c.head<2>();
  in.com_dot = state_.c_dot.head<2>();
  in.phi = state_.phi;
  in.phi_dot = state_.phi_dot;
  in.support = state_.support_pos.head<2>();
  in.step_phase = state_.step_phase;
  in.time = state_.time;

  ActuationCommand cmd = control::control_cycle(in, *plan_, r, model, options_.control);
  // The swing leg commits to its target late in the step; overrides freeze.
  if (cmd.next_footstep_override &&
      state_.step_phase < options_.plant.step_commit_fraction * commanded_T_) {
    landing_override_ = cmd.next_footstep_override;
  }
  cmd.next_footstep_override = landing_override_;
  last_cmd_ = cmd;

  const int substeps =
      static_cast<int>(std::round(options_.plant.control_period / options_.plant.physics_dt));
  StepResult result;
  for (int i = 0; i < substeps; ++i) {
    const double t_lo = state_.time;
    const Eigen::Vector2d accel = external_accel(t_lo, t_lo + options_.plant.physics_dt);
    const Eigen::Vector3d old_support = state_.support_pos;
    const bool swapped =
        plant::step_dynamics(state_, cmd, options_.plant.physics_dt, options_.scenario,
                             options_.plant, plan_->next_footstep().pos, landing_terrain_, accel);
    if (swapped) {
      result.stepped = true;
      on_step_swap(old_support);
    } else {
      const double t_swing = std::clamp(state_.time, plan_->next_footstep().t_0,
                                        plan_->next_footstep().t_f);
      state_.swing_pos = plan_->swing_ref(t_swing);
      if (landing_override_) {
        // Retarget the horizontal swing motion toward the adjusted landing.
        const Eigen::Vector3d target(landing_override_->x(), landing_override_->y(), 0.0);
        state_.swing_pos.head<2>() =
            gait::swing_trajectory(swing_liftoff_, target, options_.gait.swing_height,
                                   plan_->next_footstep().t_0, plan_->next_footstep().t_f, t_swing)
                .head<2>();
      }
    }
  }

  result.reward = 1.0 - nni(r);
  result.status = plant::check_termination(state_, episode_cap(), options_.plant);
  result.obs = observe();
  return result;
}

void Environment::teleport(const PlantState& s) {
  state_ = s;
  step_start_time_ = s.time - s.step_phase;
  committed_c0_ = 0.5 * (s.support_pos.head<2>() + s.swing_pos.head<2>());
  swing_liftoff_ = s.swing_pos;
  landing_override_.reset();
  commanded_T_ = options_.gait.step_duration;
  rebuild_plan();
}

}  // namespace bistab::env
