#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

namespace bistab::lip {

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// omega = sqrt(g / c_z), the natural frequency of the pendulum.
template <class Scalar>
Scalar natural_frequency(Scalar g, Scalar c_z) {
  if (!(g > Scalar(0)) || !(c_z > Scalar(0)))
    throw std::domain_error("natural_frequency: g and c_z must be positive");
  return std::sqrt(g / c_z);
}

/// COM acceleration of the linear inverted pendulum: omega^2 * (c - p).
template <class Scalar>
Vec2<Scalar> lip_acceleration(const Vec2<Scalar>& c, const Vec2<Scalar>& p, Scalar omega) {
  return omega * omega * (c - p);
}

/// Divergent component of motion: zeta = c + c_dot / omega.
template <class Scalar>
Vec2<Scalar> dcm_of(const Vec2<Scalar>& c, const Vec2<Scalar>& c_dot, Scalar omega) {
  if (!(omega > Scalar(0))) throw std::domain_error("dcm_of: omega must be positive");
  return c + c_dot / omega;
}

/// State-space form in (c, zeta) coordinates:
///   c_dot    = -omega * c + omega * zeta
///   zeta_dot =  omega * zeta - omega * p
template <class Scalar>
std::pair<Vec2<Scalar>, Vec2<Scalar>> state_derivative(const Vec2<Scalar>& c,
                                                       const Vec2<Scalar>& zeta,
                                                       const Vec2<Scalar>& p, Scalar omega) {
  if (!(omega > Scalar(0))) throw std::domain_error("state_derivative: omega must be positive");
  return {omega * (zeta - c), omega * (zeta - p)};
}

/// Closed-form COM trajectory of one step as a boundary value problem:
/// position c_0 at t_0 and c_f at t_f, support point f held fixed.
template <class Scalar>
Vec2<Scalar> com_closed_form(const Vec2<Scalar>& f, const Vec2<Scalar>& c_0,
                             const Vec2<Scalar>& c_f, Scalar t_0, Scalar t_f, Scalar omega,
                             Scalar t) {
  if (t_0 == t_f) throw std::domain_error("com_closed_form: zero-duration step");
  if (t < std::min(t_0, t_f) || t > std::max(t_0, t_f))
    throw std::out_of_range("com_closed_form: t outside [t_0, t_f]");
  const Scalar denom = std::sinh(omega * (t_0 - t_f));
  return f + ((f - c_f) * std::sinh(omega * (t - t_0)) + (c_0 - f) * std::sinh(omega * (t - t_f))) /
                 denom;
}

/// Analytic time derivative of com_closed_form.
template <class Scalar>
Vec2<Scalar> com_closed_form_vel(const Vec2<Scalar>& f, const Vec2<Scalar>& c_0,
                                 const Vec2<Scalar>& c_f, Scalar t_0, Scalar t_f, Scalar omega,
                                 Scalar t) {
  if (t_0 == t_f) throw std::domain_error("com_closed_form_vel: zero-duration step");
  if (t < std::min(t_0, t_f) || t > std::max(t_0, t_f))
    throw std::out_of_range("com_closed_form_vel: t outside [t_0, t_f]");
  const Scalar denom = std::sinh(omega * (t_0 - t_f));
  return omega *
         ((f - c_f) * std::cosh(omega * (t - t_0)) + (c_0 - f) * std::cosh(omega * (t - t_f))) /
         denom;
}

/// DCM propagated forward from an initial value with the support point held
/// at f: zeta(t + dt) = f + (zeta(t) - f) * exp(omega * dt).
template <class Scalar>
Vec2<Scalar> dcm_propagate(const Vec2<Scalar>& zeta, const Vec2<Scalar>& f, Scalar omega,
                           Scalar dt) {
  return f + (zeta - f) * std::exp(omega * dt);
}

/// Capture step: the DCM at the end of the current step, which is where the
/// next support foot must land to absorb the divergence.
template <class Scalar>
Vec2<Scalar> capture_step(const Vec2<Scalar>& f, const Vec2<Scalar>& zeta, Scalar omega, Scalar t,
                          Scalar T) {
  if (t > T) throw std::out_of_range("capture_step: t exceeds step duration");
  return dcm_propagate(zeta, f, omega, T - t);
}

/// Pendulum constants. omega is re-derived whenever the COM height changes.
struct PendulumModel {
  double g;
  double c_z;
  double omega;

  PendulumModel(double g_in, double c_z_in)
      : g(g_in), c_z(c_z_in), omega(natural_frequency(g_in, c_z_in)) {}

  void set_com_height(double c_z_in) {
    c_z = c_z_in;
    omega = natural_frequency(g, c_z);
  }
};

struct ComState {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  Eigen::Vector2d c_dot = Eigen::Vector2d::Zero();
};

using DcmPoint = Eigen::Vector2d;

}  // namespace bistab::lip
