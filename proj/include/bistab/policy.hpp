#pragma once

#include <Eigen/Core>

#include "bistab/control.hpp"
#include "bistab/mlp.hpp"
#include "bistab/rng.hpp"

namespace bistab::policy {

/// Per-component output bounds realized by an odd squashing map:
/// mean_i = center_i + half_range_i * tanh(raw_i). Residual components are
/// centered at zero; gain components at the expert default.
struct ActionBounds {
  Eigen::VectorXd center;
  Eigen::VectorXd half_range;

  int dim() const { return static_cast<int>(center.size()); }
};

/// Bounds for the reduced plant: 8 residuals bounded by the saturation
/// vector, 4 gains in (0, 2 * expert] so the zero network recovers the
/// expert-tuned controller.
ActionBounds reduced_plant_bounds(const control::SaturationLimits& sat,
                                  const control::Gains& expert);

struct PolicyParams {
  mlp::MlpParams actor;   // obs -> raw action means
  mlp::MlpParams critic;  // obs -> scalar value
  Eigen::VectorXd log_std;
  ActionBounds bounds;
  int obs_dim = 0;
  int act_dim = 0;
  int hidden = 64;
  int n_residuals = 8;
};

PolicyParams make_policy(int obs_dim, int act_dim, int hidden, int n_residuals,
                         const ActionBounds& bounds, Rng& rng, double log_std_init);

/// Deterministic heads for a batch of normalized observations (one column
/// per sample).
struct ForwardResult {
  Eigen::MatrixXd mean;   // bounded action means
  Eigen::VectorXd value;
};

ForwardResult policy_forward(const PolicyParams& p, const Eigen::MatrixXd& obs_norm);

/// Exploration standard deviation per component: exp(log_std) scaled by the
/// component half-range.
Eigen::VectorXd action_stddev(const PolicyParams& p);

/// Gaussian sample around the bounded mean; the environment clamps on
/// application, the log-density is taken at the unclamped sample.
Eigen::VectorXd sample_action(const PolicyParams& p, const Eigen::VectorXd& mean, Rng& rng,
                              double* logp = nullptr);

double log_prob(const PolicyParams& p, const Eigen::VectorXd& mean, const Eigen::VectorXd& action);

/// Entropy of the diagonal Gaussian (state independent).
double entropy(const PolicyParams& p);

/// Interprets a (possibly stochastic) action vector as residuals + gains,
/// clamped to the bound box (gains additionally floored to stay positive).
control::ResidualAction to_residual_action(const Eigen::VectorXd& action,
                                           const ActionBounds& bounds, double gain_floor = 0.05);

}  // namespace bistab::policy
