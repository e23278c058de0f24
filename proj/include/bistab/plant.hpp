#pragma once

#include <vector>

#include <Eigen/Core>

#include "bistab/control.hpp"
#include "bistab/gait.hpp"
#include "bistab/rng.hpp"

namespace bistab::plant {

using gait::Side;

struct PlantParams {
  double mass = 31.0;             // kg
  double gravity = 9.81;          // m/s^2
  double flywheel_inertia = 1.2;  // kg m^2
  double flywheel_damping = 0.5;  // N m s
  double physics_dt = 0.002;      // s
  double control_period = 0.02;   // s, policy period
  double height_omega = 20.0;     // rad/s, critically damped vertical tracking
  double min_pendulum_height = 0.2;  // m, floor for omega re-derivation
  double max_step_reach = 0.4;    // m, landing distance limit from the COM projection
  double step_commit_fraction = 0.6;  // swing phase after which the landing target is frozen

  // Fall thresholds.
  double fall_height = 0.35;      // m, pendulum height below this is a fall
  double fall_tilt_deg = 60.0;    // deg, torso angle limit per axis
  double fall_com_distance = 0.6; // m, horizontal COM-support distance limit
};

/// Full state of the reduced-order biped.
struct PlantState {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();        // COM (m)
  Eigen::Vector3d c_dot = Eigen::Vector3d::Zero();    // COM velocity (m/s)
  Eigen::Vector2d phi = Eigen::Vector2d::Zero();      // torso (pitch, roll) (rad)
  Eigen::Vector2d phi_dot = Eigen::Vector2d::Zero();  // torso rate (rad/s)
  Eigen::Vector3d support_pos = Eigen::Vector3d::Zero();
  Eigen::Vector3d swing_pos = Eigen::Vector3d::Zero();
  Side support_side = Side::right;
  Eigen::Vector2d zmp = Eigen::Vector2d::Zero();
  double step_phase = 0.0;  // s since step start
  double time = 0.0;        // s since episode start

  double pendulum_height() const { return c.z() - support_pos.z(); }
};

struct PushEvent {
  double t_start = 0.0;
  double duration = 0.0;
  double force = 0.0;  // N
  Eigen::Vector2d direction = Eigen::Vector2d::UnitX();
};

enum class ScenarioKind { l1_flat, l2_uneven, t1_tilt };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::l1_flat;
  double terrain_amplitude = 0.0;  // m, uniform height offset per landing
  bool pushes_enabled = true;
  Eigen::Vector2d push_interval{2.5, 3.0};  // s
  Eigen::Vector2d push_force{500.0, 850.0}; // N
  double push_duration = 0.025;             // s
  double tilt_random_deg = 8.0;
  double tilt_gain = 0.35;         // correcting component on the opposite axis
  double tilt_limit_deg = 15.0;
  double tilt_resample = 0.5;      // s between new actuator targets
  double train_episode_cap = 50.0; // s
  double eval_episode_cap = 500.0; // s

  void validate() const;
  static ScenarioSpec preset(ScenarioKind kind);
};

constexpr int kObservationDim = 16;
using Observation = Eigen::Matrix<double, kObservationDim, 1>;

/// Advances the plant by one physics substep under a held actuation command.
/// `extra_accel` carries push and platform-tilt contributions. When the step
/// phase reaches the commanded duration, the feet swap: the new support is
/// the override (if any) or `planned_landing`, raised by
/// `landing_terrain_offset`. Returns true when a step swap occurred.
bool step_dynamics(PlantState& state, const control::ActuationCommand& cmd, double dt,
                   const ScenarioSpec& scenario, const PlantParams& params,
                   const Eigen::Vector2d& planned_landing, double landing_terrain_offset,
                   const Eigen::Vector2d& extra_accel = Eigen::Vector2d::Zero());

/// Push schedule over one episode: i.i.d. uniform intervals and forces,
/// uniformly random planar direction, fixed duration.
std::vector<PushEvent> schedule_pushes(Rng& rng, const Eigen::Vector2d& interval,
                                       const Eigen::Vector2d& force, double duration,
                                       double horizon);

/// Uniform terrain height offset in [-amplitude, amplitude], drawn once per
/// footstep landing.
double sample_terrain(Rng& rng, double amplitude);

/// Tilting-platform actuator targets (x-axis, y-axis) in degrees. Each
/// combines a random component with a correcting component proportional to
/// the robot position on the opposite axis, clamped to the actuator range.
Eigen::Vector2d platform_tilt(Rng& rng, const Eigen::Vector2d& robot_pos,
                              const ScenarioSpec& scenario);

/// COM acceleration bias induced by the tilted platform.
Eigen::Vector2d tilt_gravity_bias(const Eigen::Vector2d& tilt_deg, double gravity);

/// Support-relative 16-dim observation vector.
Observation build_observation(const PlantState& state, double commanded_T);

/// Multiplies every entry by an independent factor z ~ U(1, n_max).
Observation apply_obs_noise(const Observation& obs, double n_max, Rng& rng);

enum class Termination { alive, fell, timeout };

Termination check_termination(const PlantState& state, double episode_cap,
                              const PlantParams& params);

}  // namespace bistab::plant
