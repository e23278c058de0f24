#include "bistab/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace bistab::policy {

ActionBounds reduced_plant_bounds(const control::SaturationLimits& sat,
                                  const control::Gains& expert) {
  ActionBounds b;
  b.center = Eigen::VectorXd::Zero(12);
  b.half_range = Eigen::VectorXd::Zero(12);
  b.half_range.head<8>() = sat.s;
  const Eigen::Vector4d expert_gains(expert.k_phi.x(), expert.k_phi.y(), expert.k_zeta.x(),
                                     expert.k_zeta.y());
  b.center.tail<4>() = expert_gains;
  b.half_range.tail<4>() = expert_gains;
  return b;
}

PolicyParams make_policy(int obs_dim, int act_dim, int hidden, int n_residuals,
                         const ActionBounds& bounds, Rng& rng, double log_std_init) {
  if (bounds.dim() != act_dim) throw std::invalid_argument("make_policy: bounds dim mismatch");
  PolicyParams p;
  p.obs_dim = obs_dim;
  p.act_dim = act_dim;
  p.hidden = hidden;
  p.n_residuals = n_residuals;
  p.bounds = bounds;
  // Small last layer keeps the initial policy close to the analytical
  // baseline (means at the bound centers).
  p.actor = mlp::MlpParams::init(obs_dim, hidden, hidden, act_dim, rng, 0.01);
  p.critic = mlp::MlpParams::init(obs_dim, hidden, hidden, 1, rng, 1.0);
  p.log_std = Eigen::VectorXd::Constant(act_dim, log_std_init);
  return p;
}

ForwardResult policy_forward(const PolicyParams& p, const Eigen::MatrixXd& obs_norm) {
  if (obs_norm.rows() != p.obs_dim) throw std::invalid_argument("policy_forward: obs dim mismatch");
  ForwardResult r;
  const Eigen::MatrixXd raw = mlp_forward(p.actor, obs_norm);
  r.mean = ((raw.array().tanh().colwise() * p.bounds.half_range.array()).colwise() +
            p.bounds.center.array())
               .matrix();
  r.value = mlp_forward(p.critic, obs_norm).row(0).transpose();
  return r;
}

Eigen::VectorXd action_stddev(const PolicyParams& p) {
  return p.log_std.array().exp() * p.bounds.half_range.array();
}

Eigen::VectorXd sample_action(const PolicyParams& p, const Eigen::VectorXd& mean, Rng& rng,
                              double* logp) {
  const Eigen::VectorXd sigma = action_stddev(p);
  const Eigen::VectorXd action = mean + sigma.cwiseProduct(rng.normal_vec(mean.size()));
  if (logp) *logp = log_prob(p, mean, action);
  return action;
}

double log_prob(const PolicyParams& p, const Eigen::VectorXd& mean, const Eigen::VectorXd& action) {
  const Eigen::VectorXd sigma = action_stddev(p);
  const Eigen::ArrayXd z = (action - mean).cwiseQuotient(sigma).array();
  return -0.5 * z.square().sum() - sigma.array().log().sum() -
         0.5 * static_cast<double>(mean.size()) * std::log(2.0 * M_PI);
}

double entropy(const PolicyParams& p) {
  return action_stddev(p).array().log().sum() +
         0.5 * static_cast<double>(p.act_dim) * std::log(2.0 * M_PI * std::exp(1.0));
}

control::ResidualAction to_residual_action(const Eigen::VectorXd& action,
                                           const ActionBounds& bounds, double gain_floor) {
  if (action.size() != 12 || bounds.dim() != 12)
    throw std::invalid_argument("to_residual_action: expected 12 components");
  const Eigen::VectorXd lo = bounds.center - bounds.half_range;
  const Eigen::VectorXd hi = bounds.center + bounds.half_range;
  const Eigen::VectorXd a = action.cwiseMax(lo).cwiseMin(hi);
  const control::Vec8 delta = a.head<8>();
  const auto gain = [&](int i) { return std::max(a[i], gain_floor); };
  control::Gains gains(Eigen::Vector2d(gain(8), gain(9)), Eigen::Vector2d(gain(10), gain(11)));
  return control::ResidualAction(delta, gains);
}

}  // namespace bistab::policy
