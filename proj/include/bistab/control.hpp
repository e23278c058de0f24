#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

#include "bistab/gait.hpp"
#include "bistab/lip.hpp"

namespace bistab::control {

using Vec8 = Eigen::Matrix<double, 8, 1>;

/// PD gains for torso regulation and DCM tracking. Axis order is
/// (pitch, roll) for k_phi and (x, y) for k_zeta.
struct Gains {
  Eigen::Vector2d k_phi;
  Eigen::Vector2d k_zeta;

  Gains(const Eigen::Vector2d& phi, const Eigen::Vector2d& zeta) : k_phi(phi), k_zeta(zeta) {
    if (!(k_phi.minCoeff() > 0) || !(k_zeta.minCoeff() > 0))
      throw std::invalid_argument("Gains: all components must be positive");
  }
};

/// Residual indices within the 8-vector delta.
enum ResidualIndex {
  kZmpX = 0,
  kZmpY = 1,
  kTorquePitch = 2,
  kTorqueRoll = 3,
  kStepX = 4,
  kStepY = 5,
  kComHeight = 6,
  kStepTime = 7,
};

/// Per-component residual saturation bounds S.
struct SaturationLimits {
  Vec8 s;

  SaturationLimits() {
    s << 0.03, 0.03, 20.0, 20.0, 0.05, 0.05, 0.05, 0.1;
  }
  explicit SaturationLimits(const Vec8& limits) : s(limits) {
    if (!(s.minCoeff() > 0)) throw std::invalid_argument("SaturationLimits: entries must be > 0");
  }
};

/// Learned corrections merged into the analytical command each cycle.
struct ResidualAction {
  Vec8 delta = Vec8::Zero();
  Gains gains;

  explicit ResidualAction(const Gains& g) : gains(g) {}
  ResidualAction(const Vec8& d, const Gains& g) : delta(d), gains(g) {}
};

struct ActuationCommand {
  Eigen::Vector2d zmp_cmd = Eigen::Vector2d::Zero();
  Eigen::Vector2d flywheel_torque = Eigen::Vector2d::Zero();  // (pitch, roll)
  std::optional<Eigen::Vector2d> next_footstep_override;
  double commanded_c_z = 0.0;
  double commanded_T = 0.0;
  bool zmp_saturated = false;
};

struct ControlParams {
  Gains default_gains{Eigen::Vector2d(6.0, 6.0), Eigen::Vector2d(3.0, 3.0)};
  SaturationLimits saturation;
  Eigen::Vector2d foot_half_extents{0.09, 0.045};
  double rate_to_torque_kd = 10.0;  // 1/s; maps the torso rate command to torque
  double flywheel_inertia = 1.2;    // kg m^2
  double torque_limit = 100.0;      // N m, actuator cap on the total torque
  double min_step_time = 0.2;       // s
  double max_step_time = 1.0;       // s
  bool force_step_adjust = false;   // take capture steps even when unsaturated
};

/// Torso regulation: corrective angular rate phi_dot_d - K_phi .* (phi - phi_d).
Eigen::Vector2d torso_pd(const Eigen::Vector2d& phi, const Eigen::Vector2d& phi_dot,
                         const Eigen::Vector2d& phi_d, const Eigen::Vector2d& phi_dot_d,
                         const Eigen::Vector2d& k_phi);

/// DCM tracker: commands zeta_dot = zeta_dot_d - K_zeta .* (zeta - zeta_d) and
/// inverts the DCM dynamics to the ZMP that realizes it.
Eigen::Vector2d dcm_tracker(const lip::DcmPoint& zeta, const lip::DcmPoint& zeta_d,
                            const Eigen::Vector2d& zeta_d_dot, const Eigen::Vector2d& k_zeta,
                            double omega);

/// Component-wise clamp of the ZMP command to the rectangular support
/// polygon. The flag reports whether any clamp occurred.
std::pair<Eigen::Vector2d, bool> saturate_zmp(const Eigen::Vector2d& zmp_cmd,
                                              const Eigen::Vector2d& support_center,
                                              const Eigen::Vector2d& half_extents);

/// Capture-step adjustment: when the tracker saturates (or adjustment is
/// forced), land the next step on the predicted end-of-step DCM plus the
/// learned offset.
std::optional<Eigen::Vector2d> maybe_adjust_step(const lip::DcmPoint& zeta,
                                                 const Eigen::Vector2d& support_foot, double t,
                                                 double T, double omega, bool saturated,
                                                 const Eigen::Vector2d& delta_step,
                                                 bool force = false);

/// Measurements consumed by one control cycle, assembled by the environment.
struct ControlInputs {
  Eigen::Vector2d com;        // horizontal COM (m)
  Eigen::Vector2d com_dot;    // horizontal COM velocity (m/s)
  Eigen::Vector2d phi;        // torso angle (pitch, roll) (rad)
  Eigen::Vector2d phi_dot;    // torso rate (rad/s)
  Eigen::Vector2d support;    // support foot center (m)
  double step_phase = 0.0;    // s since step start
  double time = 0.0;          // episode time (s)
};

/// Full tracking cycle: DCM tracking plus residual merge, ZMP saturation,
/// capture-step adjustment, torso torque, and commanded height/step-time.
ActuationCommand control_cycle(const ControlInputs& in, const gait::GaitPlan& plan,
                               const ResidualAction& residual, const lip::PendulumModel& model,
                               const ControlParams& params);

}  // namespace bistab::control
