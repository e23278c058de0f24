#pragma once

// Test-only reference implementations, independent of the library code paths
// they check: numerical integration of the pendulum dynamics, a shooting
// solver for the COM boundary value problem, and a brute-force lambda-return.

#include <cmath>
#include <vector>

#include <Eigen/Core>

namespace oracles {

using Eigen::Vector2d;

struct LipTrajectory {
  std::vector<double> t;
  std::vector<Vector2d> c;
  std::vector<Vector2d> v;
};

/// RK4 integration of c'' = omega^2 (c - f) with the support point fixed.
inline LipTrajectory integrate_lip(const Vector2d& f, Vector2d c, Vector2d v, double omega,
                                   double t0, double tf, double dt) {
  const auto acc = [&](const Vector2d& pos) { return (omega * omega) * (pos - f); };
  LipTrajectory out;
  double t = t0;
  out.t.push_back(t);
  out.c.push_back(c);
  out.v.push_back(v);
  while (t < tf - 1e-12) {
    const double h = std::min(dt, tf - t);
    const Vector2d k1c = v, k1v = acc(c);
    const Vector2d k2c = v + 0.5 * h * k1v, k2v = acc(c + 0.5 * h * k1c);
    const Vector2d k3c = v + 0.5 * h * k2v, k3v = acc(c + 0.5 * h * k2c);
    const Vector2d k4c = v + h * k3v, k4v = acc(c + h * k3c);
    c += h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t += h;
    out.t.push_back(t);
    out.c.push_back(c);
    out.v.push_back(v);
  }
  return out;
}

/// Shooting solve of the boundary value problem: the end position is affine
/// in the initial velocity (linear dynamics), so two probe integrations per
/// axis determine v0 exactly.
inline Vector2d shoot_initial_velocity(const Vector2d& f, const Vector2d& c0, const Vector2d& cf,
                                       double omega, double t0, double tf, double dt) {
  Vector2d v0;
  for (int axis = 0; axis < 2; ++axis) {
    const auto end_pos = [&](double v) {
      Vector2d probe = Vector2d::Zero();
      probe[axis] = v;
      return integrate_lip(f, c0, probe, omega, t0, tf, dt).c.back()[axis];
    };
    const double e0 = end_pos(0.0);
    const double e1 = end_pos(1.0);
    v0[axis] = (cf[axis] - e0) / (e1 - e0);
  }
  return v0;
}

/// Brute-force lambda-return: explicit exponentially weighted n-step mixture,
/// with the final n-step return absorbing the remaining lambda mass.
inline Eigen::VectorXd lambda_return_bruteforce(const Eigen::VectorXd& rewards,
                                                const Eigen::VectorXd& values, bool terminal,
                                                double bootstrap, double gamma, double lam) {
  const Eigen::Index n = rewards.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const Eigen::Index remaining = n - t;
    double mix = 0.0;
    for (Eigen::Index k = 1; k <= remaining; ++k) {
      double g = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) g += std::pow(gamma, double(j)) * rewards[t + j];
      const double tail = t + k < n ? values[t + k] : (terminal ? 0.0 : bootstrap);
      g += std::pow(gamma, double(k)) * tail;
      const double w = k < remaining ? (1.0 - lam) * std::pow(lam, double(k - 1))
                                     : std::pow(lam, double(k - 1));
      mix += w * g;
    }
    out[t] = mix;
  }
  return out;
}

}  // namespace oracles
