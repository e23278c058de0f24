#include "bistab/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bistab::plant {

void ScenarioSpec::validate() const {
  if (terrain_amplitude < 0) throw std::invalid_argument("ScenarioSpec: negative terrain amplitude");
  if (!(push_interval.x() > 0) || push_interval.y() < push_interval.x())
    throw std::invalid_argument("ScenarioSpec: push interval must be positive and ordered");
  if (push_force.y() < push_force.x() || push_force.x() < 0)
    throw std::invalid_argument("ScenarioSpec: push force range must be ordered and non-negative");
  if (!(push_duration > 0)) throw std::invalid_argument("ScenarioSpec: push duration must be > 0");
}

ScenarioSpec ScenarioSpec::preset(ScenarioKind kind) {
  ScenarioSpec s;
  s.kind = kind;
  switch (kind) {
    case ScenarioKind::l1_flat:
      break;
    case ScenarioKind::l2_uneven:
      s.terrain_amplitude = 0.02;
      break;
    case ScenarioKind::t1_tilt:
      s.pushes_enabled = false;  // the tilting platform is the only disturbance
      break;
  }
  return s;
}

bool step_dynamics(PlantState& state, const control::ActuationCommand& cmd, double dt,
                   const ScenarioSpec& scenario, const PlantParams& params,
                   const Eigen::Vector2d& planned_landing, double landing_terrain_offset,
                   const Eigen::Vector2d& extra_accel) {
  if (!(dt > 0) || dt > 0.01) throw std::domain_error("step_dynamics: dt outside (0, 0.01]");

  const double height = std::max(state.pendulum_height(), params.min_pendulum_height);
  const double omega2 = params.gravity / height;

  // Horizontal COM: LIP term, flywheel reaction (pitch torque couples with x,
  // roll with y), and external contributions.
  Eigen::Vector2d accel =
      omega2 * (state.c.head<2>() - cmd.zmp_cmd) - cmd.flywheel_torque / (params.mass * height);
  accel += extra_accel;

  // Vertical COM: critically damped tracking of the commanded height above
  // the support plane.
  const double z_cmd = state.support_pos.z() + cmd.commanded_c_z;
  const double wz = params.height_omega;
  const double accel_z = wz * wz * (z_cmd - state.c.z()) - 2.0 * wz * state.c_dot.z();

  // Flywheel with viscous damping.
  const Eigen::Vector2d phi_ddot =
      (cmd.flywheel_torque - params.flywheel_damping * state.phi_dot) / params.flywheel_inertia;

  // Semi-implicit Euler.
  state.c_dot.head<2>() += accel * dt;
  state.c_dot.z() += accel_z * dt;
  state.phi_dot += phi_ddot * dt;
  state.c += state.c_dot * dt;
  state.phi += state.phi_dot * dt;

  state.zmp = cmd.zmp_cmd;
  state.step_phase += dt;
  state.time += dt;

  // Step swap at the commanded duration (half-substep rounding keeps swaps
  // aligned with the nominal grid despite accumulated dt error).
  if (state.step_phase + 0.5 * dt >= cmd.commanded_T) {
    Eigen::Vector2d landing = cmd.next_footstep_override.value_or(planned_landing);
    // Kinematic reach limit: the swing foot cannot land farther from the COM
    // than the legs allow, which bounds how much a capture step can absorb.
    const Eigen::Vector2d com_ground = state.c.head<2>();
    const Eigen::Vector2d offset = landing - com_ground;
    const double reach = offset.norm();
    if (reach > params.max_step_reach) landing = com_ground + offset * (params.max_step_reach / reach);
    const Eigen::Vector3d old_support = state.support_pos;
    state.support_pos =
        Eigen::Vector3d(landing.x(), landing.y(),
                        scenario.terrain_amplitude > 0 ? landing_terrain_offset : 0.0);
    state.swing_pos = old_support;
    state.support_side = gait::opposite(state.support_side);
    state.step_phase = 0.0;
    return true;
  }
  return false;
}

std::vector<PushEvent> schedule_pushes(Rng& rng, const Eigen::Vector2d& interval,
                                       const Eigen::Vector2d& force, double duration,
                                       double horizon) {
  if (interval.y() < interval.x() || force.y() < force.x())
    throw std::invalid_argument("schedule_pushes: ranges must be ordered");
  std::vector<PushEvent> events;
  double t = 0.0;
  while (true) {
    t += rng.uniform(interval.x(), interval.y());
    if (t >= horizon) break;
    PushEvent e;
    e.t_start = t;
    e.duration = duration;
    e.force = rng.uniform(force.x(), force.y());
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    e.direction = Eigen::Vector2d(std::cos(angle), std::sin(angle));
    events.push_back(e);
  }
  return events;
}

double sample_terrain(Rng& rng, double amplitude) {
  if (amplitude < 0) throw std::invalid_argument("sample_terrain: negative amplitude");
  if (amplitude == 0) return 0.0;
  return rng.uniform(-amplitude, amplitude);
}

Eigen::Vector2d platform_tilt(Rng& rng, const Eigen::Vector2d& robot_pos,
                              const ScenarioSpec& scenario) {
  const double rad2deg = 180.0 / M_PI;
  const double lim = scenario.tilt_limit_deg;
  // Each actuator corrects using the robot position on the opposite axis.
  const double rx = rng.uniform(-scenario.tilt_random_deg, scenario.tilt_random_deg);
  const double ry = rng.uniform(-scenario.tilt_random_deg, scenario.tilt_random_deg);
  const double x_act = std::clamp(rx + scenario.tilt_gain * robot_pos.y() * rad2deg, -lim, lim);
  const double y_act = std::clamp(ry + scenario.tilt_gain * robot_pos.x() * rad2deg, -lim, lim);
  return {x_act, y_act};
}

Eigen::Vector2d tilt_gravity_bias(const Eigen::Vector2d& tilt_deg, double gravity) {
  const double deg2rad = M_PI / 180.0;
  // Positive actuator angles slope the platform so gravity pushes the robot
  // back toward the center (x actuator reacts to y displacement and vice
  // versa).
  return {-gravity * std::sin(tilt_deg.y() * deg2rad), -gravity * std::sin(tilt_deg.x() * deg2rad)};
}

Observation build_observation(const PlantState& state, double commanded_T) {
  Observation obs;
  const Eigen::Vector3d rel_com = state.c - state.support_pos;
  obs.segment<3>(0) = rel_com;
  obs.segment<3>(3) = state.c_dot;
  obs.segment<2>(6) = state.phi;
  obs.segment<2>(8) = state.phi_dot;
  obs.segment<2>(10) = state.zmp - state.support_pos.head<2>();
  obs.segment<2>(12) = (state.swing_pos - state.support_pos).head<2>();
  obs[14] = state.step_phase / commanded_T;
  obs[15] = gait::side_sign(state.support_side);
  return obs;
}

Observation apply_obs_noise(const Observation& obs, double n_max, Rng& rng) {
  if (n_max < 1.0) throw std::domain_error("apply_obs_noise: N must be >= 1");
  Observation out;
  for (int i = 0; i < kObservationDim; ++i) out[i] = obs[i] * rng.uniform(1.0, n_max);
  return out;
}

Termination check_termination(const PlantState& state, double episode_cap,
                              const PlantParams& params) {
  const double tilt_limit = params.fall_tilt_deg * M_PI / 180.0;
  const bool fell = state.pendulum_height() < params.fall_height ||
                    state.phi.cwiseAbs().maxCoeff() > tilt_limit ||
                    (state.c - state.support_pos).head<2>().norm() > params.fall_com_distance;
  if (fell) return Termination::fell;
  if (state.time >= episode_cap) return Termination::timeout;
  return Termination::alive;
}

}  // namespace bistab::plant
