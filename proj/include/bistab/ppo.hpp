#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "bistab/policy.hpp"
#include "bistab/rng.hpp"
#include "bistab/symmetry.hpp"

namespace bistab::ppo {

struct TrainConfig {
  int batch_size = 8192;       // environment steps per update
  int minibatch_size = 512;
  int epochs = 4;
  int n_envs = 8;
  double lr0 = 3e-4;           // linearly decayed to 0 over total_steps
  double clip = 0.2;
  double gamma = 0.99;
  double lam = 0.95;
  double entropy_coef = 0.003;
  double value_coef = 0.5;
  double log_std_init = -1.0;
  std::int64_t total_steps = 2'000'000;
  double symmetry_ratio = 0.5;
  int hidden = 64;
  std::int64_t checkpoint_every = 500'000;  // env steps between checkpoints

  void validate() const;
};

/// Learning rate of the linear scheduler at a given consumed-step count.
double lr_at(const TrainConfig& cfg, std::int64_t env_steps_done);

/// Residual-intervention reward: R = 1 - mean_i |delta_i| / S_i.
double reward(const control::ResidualAction& residual, const control::SaturationLimits& sat);

/// Generalized advantage estimate over one episode chunk. `terminal` marks a
/// real episode end (bootstrap 0); otherwise the chunk was truncated and
/// `bootstrap_value` is the critic estimate of the next state.
Eigen::VectorXd gae_advantages(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                               bool terminal, double bootstrap_value, double gamma, double lam);

/// lambda-return value targets: advantage + value estimate.
Eigen::VectorXd lambda_returns(const Eigen::VectorXd& advantages, const Eigen::VectorXd& values);

/// Clipped-surrogate objective for one sample (to be maximized).
double clipped_objective(double ratio, double advantage, double clip);

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double lr = 0.0;
};

struct AdamState {
  Eigen::VectorXd m, v;
  std::int64_t t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

/// Gradients of the full PPO loss (clipped surrogate + value + entropy
/// terms) for one minibatch; exact backpropagation. Exposed separately so
/// tests can check it against finite differences.
struct LossGrads {
  mlp::MlpGrads actor;
  mlp::MlpGrads critic;
  Eigen::VectorXd log_std;
};

struct MiniBatch {
  Eigen::MatrixXd obs;        // normalized, one column per sample
  Eigen::MatrixXd act;
  Eigen::VectorXd advantage;  // standardized
  Eigen::VectorXd value_target;
  Eigen::VectorXd logp_old;
};

double ppo_loss(const policy::PolicyParams& params, const MiniBatch& mb, const TrainConfig& cfg,
                LossGrads* grads = nullptr, LossStats* stats = nullptr);

/// Owns the policy parameters and optimizer state; one update consumes one
/// (possibly augmented) batch.
class PpoLearner {
 public:
  PpoLearner(policy::PolicyParams params, const TrainConfig& cfg);

  /// Runs epochs x minibatches over the batch. Observations in `batch` are
  /// raw; they are normalized here with `stats`. logp_old is recomputed for
  /// every sample under the pre-update parameters so mirrored insertions get
  /// exact densities. Advantages are standardized across the whole batch.
  LossStats update(const std::vector<symmetry::Sample>& batch,
                   const symmetry::SharedNormStats& stats, std::int64_t env_steps_done, Rng& rng);

  const policy::PolicyParams& params() const { return params_; }
  policy::PolicyParams& params() { return params_; }
  const TrainConfig& config() const { return cfg_; }

 private:
  void adam_step(const LossGrads& grads, double lr);

  policy::PolicyParams params_;
  TrainConfig cfg_;
  AdamState opt_;
};

}  // namespace bistab::ppo
