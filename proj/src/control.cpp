#include "bistab/control.hpp"

#include <algorithm>
#include <cmath>

namespace bistab::control {

Eigen::Vector2d torso_pd(const Eigen::Vector2d& phi, const Eigen::Vector2d& phi_dot,
                         const Eigen::Vector2d& phi_d, const Eigen::Vector2d& phi_dot_d,
                         const Eigen::Vector2d& k_phi) {
  (void)phi_dot;  // rate law; the actual rate enters at the torque mapping
  return phi_dot_d - k_phi.cwiseProduct(phi - phi_d);
}

Eigen::Vector2d dcm_tracker(const lip::DcmPoint& zeta, const lip::DcmPoint& zeta_d,
                            const Eigen::Vector2d& zeta_d_dot, const Eigen::Vector2d& k_zeta,
                            double omega) {
  if (!(omega > 0)) throw std::domain_error("dcm_tracker: omega must be positive");
  const Eigen::Vector2d zeta_dot_cmd = zeta_d_dot - k_zeta.cwiseProduct(zeta - zeta_d);
  return zeta - zeta_dot_cmd / omega;
}

std::pair<Eigen::Vector2d, bool> saturate_zmp(const Eigen::Vector2d& zmp_cmd,
                                              const Eigen::Vector2d& support_center,
                                              const Eigen::Vector2d& half_extents) {
  if (!(half_extents.minCoeff() > 0))
    throw std::invalid_argument("saturate_zmp: half extents must be positive");
  const Eigen::Vector2d lo = support_center - half_extents;
  const Eigen::Vector2d hi = support_center + half_extents;
  const Eigen::Vector2d clamped = zmp_cmd.cwiseMax(lo).cwiseMin(hi);
  return {clamped, (clamped - zmp_cmd).cwiseAbs().maxCoeff() > 0.0};
}

std::optional<Eigen::Vector2d> maybe_adjust_step(const lip::DcmPoint& zeta,
                                                 const Eigen::Vector2d& support_foot, double t,
                                                 double T, double omega, bool saturated,
                                                 const Eigen::Vector2d& delta_step, bool force) {
  if (!saturated && !force) return std::nullopt;
  return lip::capture_step<double>(support_foot, zeta, omega, t, T) + delta_step;
}

ActuationCommand control_cycle(const ControlInputs& in, const gait::GaitPlan& plan,
                               const ResidualAction& residual, const lip::PendulumModel& model,
                               const ControlParams& params) {
  ActuationCommand cmd;

  cmd.commanded_c_z = plan.com_height() + residual.delta[kComHeight];
  cmd.commanded_T = std::clamp(plan.nominal_step_duration() + residual.delta[kStepTime],
                               params.min_step_time, params.max_step_time);

  // DCM tracking against the planned reference, with the measured DCM taken
  // at the live pendulum frequency.
  const lip::DcmPoint zeta = lip::dcm_of<double>(in.com, in.com_dot, model.omega);
  const lip::DcmPoint zeta_d = plan.dcm_ref(in.time);
  const Eigen::Vector2d zeta_d_dot = plan.dcm_ref_dot(in.time);
  Eigen::Vector2d p =
      dcm_tracker(zeta, zeta_d, zeta_d_dot, residual.gains.k_zeta, model.omega);
  p += Eigen::Vector2d(residual.delta[kZmpX], residual.delta[kZmpY]);

  auto [p_sat, saturated] = saturate_zmp(p, in.support, params.foot_half_extents);
  cmd.zmp_cmd = p_sat;
  cmd.zmp_saturated = saturated;

  cmd.next_footstep_override = maybe_adjust_step(
      zeta, in.support, std::min(in.step_phase, cmd.commanded_T), cmd.commanded_T, model.omega,
      saturated, Eigen::Vector2d(residual.delta[kStepX], residual.delta[kStepY]),
      params.force_step_adjust);

  // Torso rate command realized as a flywheel torque.
  const Eigen::Vector2d rate_cmd = torso_pd(in.phi, in.phi_dot, Eigen::Vector2d::Zero(),
                                            Eigen::Vector2d::Zero(), residual.gains.k_phi);
  Eigen::Vector2d torque =
      params.flywheel_inertia * params.rate_to_torque_kd * (rate_cmd - in.phi_dot);
  torque += Eigen::Vector2d(residual.delta[kTorquePitch], residual.delta[kTorqueRoll]);
  cmd.flywheel_torque =
      torque.cwiseMax(-params.torque_limit).cwiseMin(params.torque_limit);

  return cmd;
}

}  // namespace bistab::control
