#include "bistab/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bistab::ppo {

void TrainConfig::validate() const {
  if (batch_size <= 0 || minibatch_size <= 0 || epochs <= 0 || n_envs <= 0)
    throw std::invalid_argument("TrainConfig: sizes must be positive");
  if (batch_size % n_envs != 0)
    throw std::invalid_argument("TrainConfig: batch_size must divide evenly across envs");
  if (symmetry_ratio < 0.0 || symmetry_ratio > 1.0)
    throw std::invalid_argument("TrainConfig: symmetry_ratio outside [0,1]");
  if (!(clip > 0.0) || clip >= 1.0) throw std::invalid_argument("TrainConfig: clip outside (0,1)");
  if (total_steps <= 0) throw std::invalid_argument("TrainConfig: total_steps must be positive");
}

double lr_at(const TrainConfig& cfg, std::int64_t env_steps_done) {
  return cfg.lr0 * (1.0 - static_cast<double>(env_steps_done) / static_cast<double>(cfg.total_steps));
}

double reward(const control::ResidualAction& residual, const control::SaturationLimits& sat) {
  return 1.0 - residual.delta.cwiseAbs().cwiseQuotient(sat.s).mean();
}

Eigen::VectorXd gae_advantages(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                               bool terminal, double bootstrap_value, double gamma, double lam) {
  const Eigen::Index n = rewards.size();
  if (values.size() != n) throw std::invalid_argument("gae_advantages: length mismatch");
  Eigen::VectorXd adv(n);
  double gae = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double next_value =
        t == n - 1 ? (terminal ? 0.0 : bootstrap_value) : values[t + 1];
    const double delta = rewards[t] + gamma * next_value - values[t];
    gae = delta + gamma * lam * gae;
    adv[t] = gae;
  }
  return adv;
}

Eigen::VectorXd lambda_returns(const Eigen::VectorXd& advantages, const Eigen::VectorXd& values) {
  return advantages + values;
}

double clipped_objective(double ratio, double advantage, double clip) {
  return std::min(ratio * advantage,
                  std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage);
}

double ppo_loss(const policy::PolicyParams& params, const MiniBatch& mb, const TrainConfig& cfg,
                LossGrads* grads, LossStats* stats) {
  const Eigen::Index batch = mb.obs.cols();
  const double inv_b = 1.0 / static_cast<double>(batch);

  mlp::MlpCache actor_cache, critic_cache;
  const Eigen::MatrixXd raw = mlp_forward(params.actor, mb.obs, grads ? &actor_cache : nullptr);
  const Eigen::MatrixXd squash = raw.array().tanh().matrix();
  const Eigen::MatrixXd mean =
      ((squash.array().colwise() * params.bounds.half_range.array()).colwise() +
       params.bounds.center.array())
          .matrix();
  const Eigen::VectorXd value =
      mlp_forward(params.critic, mb.obs, grads ? &critic_cache : nullptr).row(0).transpose();

  const Eigen::VectorXd sigma = policy::action_stddev(params);
  const Eigen::MatrixXd z = ((mb.act - mean).array().colwise() / sigma.array()).matrix();
  const double logp_const = sigma.array().log().sum() +
                            0.5 * static_cast<double>(params.act_dim) * std::log(2.0 * M_PI);
  const Eigen::VectorXd logp =
      (-0.5 * z.colwise().squaredNorm().array() - logp_const).matrix().transpose();

  const Eigen::ArrayXd ratio = (logp - mb.logp_old).array().exp();
  const Eigen::ArrayXd adv = mb.advantage.array();
  const Eigen::ArrayXd unclipped = ratio * adv;
  const Eigen::ArrayXd clipped =
      ratio.min(1.0 + cfg.clip).max(1.0 - cfg.clip) * adv;
  const double policy_loss = -(unclipped.min(clipped)).mean();

  const Eigen::ArrayXd verr = (value - mb.value_target).array();
  const double value_loss = cfg.value_coef * 0.5 * verr.square().mean();

  const double ent = policy::entropy(params);
  const double total = policy_loss + value_loss - cfg.entropy_coef * ent;
  if (!std::isfinite(total)) {
    std::ostringstream oss;
    oss << "ppo_loss: non-finite loss (policy=" << policy_loss << " value=" << value_loss
        << " entropy=" << ent << ")";
    throw std::runtime_error(oss.str());
  }

  if (stats) {
    stats->policy_loss = policy_loss;
    stats->value_loss = value_loss;
    stats->entropy = ent;
    stats->clip_fraction = ((ratio - 1.0).abs() > cfg.clip).cast<double>().mean();
  }

  if (grads) {
    // d loss / d logp_i: gradient flows only where the unclipped surrogate
    // is active (<= covers the tie inside the clip region).
    Eigen::ArrayXd d_logp(batch);
    for (Eigen::Index i = 0; i < batch; ++i)
      d_logp[i] = unclipped[i] <= clipped[i] ? -adv[i] * ratio[i] * inv_b : 0.0;

    // Through the Gaussian mean and the tanh squash.
    Eigen::MatrixXd d_mean = (z.array().colwise() / sigma.array()).matrix();
    d_mean.array().rowwise() *= d_logp.transpose();
    Eigen::ArrayXXd dsquash = 1.0 - squash.array().square();
    dsquash.colwise() *= params.bounds.half_range.array();
    const Eigen::MatrixXd d_raw = (d_mean.array() * dsquash).matrix();
    mlp_backward(params.actor, actor_cache, d_raw, grads->actor);

    // log-std: policy term plus the entropy bonus.
    Eigen::ArrayXXd z2 = z.array().square();
    z2.rowwise() *= d_logp.transpose();
    grads->log_std = (z2.rowwise().sum() - d_logp.sum()).matrix();
    grads->log_std.array() -= cfg.entropy_coef;

    const Eigen::MatrixXd d_value = (cfg.value_coef * inv_b * verr).matrix().transpose();
    mlp_backward(params.critic, critic_cache, d_value, grads->critic);
  }
  return total;
}

PpoLearner::PpoLearner(policy::PolicyParams params, const TrainConfig& cfg)
    : params_(std::move(params)), cfg_(cfg) {
  cfg_.validate();
  Eigen::Index total = params_.log_std.size();
  for (const auto& ref : mlp::tensor_refs(params_.actor)) total += ref.size;
  for (const auto& ref : mlp::tensor_refs(params_.critic)) total += ref.size;
  opt_.m = Eigen::VectorXd::Zero(total);
  opt_.v = Eigen::VectorXd::Zero(total);
}

void PpoLearner::adam_step(const LossGrads& grads, double lr) {
  ++opt_.t;
  const double bc1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(opt_.t));
  const double bc2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(opt_.t));

  auto apply = [&](double* value, const double* grad, Eigen::Index n, Eigen::Index offset) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double& m = opt_.m[offset + i];
      double& v = opt_.v[offset + i];
      const double g = grad[i];
      m = opt_.beta1 * m + (1.0 - opt_.beta1) * g;
      v = opt_.beta2 * v + (1.0 - opt_.beta2) * g * g;
      value[i] -= lr * (m / bc1) / (std::sqrt(v / bc2) + opt_.eps);
    }
    return offset + n;
  };

  Eigen::Index off = 0;
  auto actor_refs = mlp::tensor_refs(params_.actor, &grads.actor);
  for (auto& ref : actor_refs) off = apply(ref.value, ref.grad, ref.size, off);
  auto critic_refs = mlp::tensor_refs(params_.critic, &grads.critic);
  for (auto& ref : critic_refs) off = apply(ref.value, ref.grad, ref.size, off);
  apply(params_.log_std.data(), grads.log_std.data(), params_.log_std.size(), off);
}

LossStats PpoLearner::update(const std::vector<symmetry::Sample>& batch,
                             const symmetry::SharedNormStats& stats,
                             std::int64_t env_steps_done, Rng& rng) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) throw std::invalid_argument("PpoLearner::update: empty batch");

  Eigen::MatrixXd obs(params_.obs_dim, n);
  Eigen::MatrixXd act(params_.act_dim, n);
  Eigen::VectorXd adv(n), vtgt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    obs.col(i) = stats.normalize(batch[i].obs);
    act.col(i) = batch[i].act;
    adv[i] = batch[i].advantage;
    vtgt[i] = batch[i].value_target;
  }

  // Densities of every (state, action) under the pre-update policy; mirrored
  // insertions need these computed fresh since the old policy is not exactly
  // equivariant.
  const policy::ForwardResult fwd = policy::policy_forward(params_, obs);
  const Eigen::VectorXd sigma = policy::action_stddev(params_);
  const Eigen::MatrixXd z0 = ((act - fwd.mean).array().colwise() / sigma.array()).matrix();
  const double logp_const = sigma.array().log().sum() +
                            0.5 * static_cast<double>(params_.act_dim) * std::log(2.0 * M_PI);
  const Eigen::VectorXd logp_old =
      (-0.5 * z0.colwise().squaredNorm().array() - logp_const).matrix().transpose();

  // Advantages standardized across the augmented batch.
  const double mean_adv = adv.mean();
  const double std_adv = std::sqrt((adv.array() - mean_adv).square().mean());
  adv = (adv.array() - mean_adv) / (std_adv + 1e-8);

  const double lr = lr_at(cfg_, env_steps_done);
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  LossStats avg;
  int updates = 0;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    for (Eigen::Index i = n - 1; i > 0; --i)
      std::swap(idx[i], idx[rng.uniform_int(0, static_cast<int>(i))]);

    for (Eigen::Index start = 0; start < n; start += cfg_.minibatch_size) {
      const Eigen::Index count = std::min<Eigen::Index>(cfg_.minibatch_size, n - start);
      MiniBatch mb;
      mb.obs.resize(params_.obs_dim, count);
      mb.act.resize(params_.act_dim, count);
      mb.advantage.resize(count);
      mb.value_target.resize(count);
      mb.logp_old.resize(count);
      for (Eigen::Index k = 0; k < count; ++k) {
        const Eigen::Index j = idx[start + k];
        mb.obs.col(k) = obs.col(j);
        mb.act.col(k) = act.col(j);
        mb.advantage[k] = adv[j];
        mb.value_target[k] = vtgt[j];
        mb.logp_old[k] = logp_old[j];
      }

      LossGrads grads;
      grads.actor = mlp::MlpGrads::zeros_like(params_.actor);
      grads.critic = mlp::MlpGrads::zeros_like(params_.critic);
      grads.log_std = Eigen::VectorXd::Zero(params_.act_dim);
      LossStats s;
      ppo_loss(params_, mb, cfg_, &grads, &s);
      adam_step(grads, lr);

      avg.policy_loss += s.policy_loss;
      avg.value_loss += s.value_loss;
      avg.entropy += s.entropy;
      avg.clip_fraction += s.clip_fraction;
      ++updates;
    }
  }

  avg.policy_loss /= updates;
  avg.value_loss /= updates;
  avg.entropy /= updates;
  avg.clip_fraction /= updates;
  avg.lr = lr;
  return avg;
}

}  // namespace bistab::ppo
