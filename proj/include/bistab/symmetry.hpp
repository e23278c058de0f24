#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace bistab::symmetry {

/// Sagittal-reflection automorphism as permutation-plus-sign tables on the
/// observation and action vectors. Applying a table twice must be the
/// identity.
struct MirrorSpec {
  std::vector<int> obs_perm;
  Eigen::VectorXd obs_sign;
  std::vector<int> act_perm;
  Eigen::VectorXd act_sign;

  void validate() const;

  /// Tables for the reduced plant: identity permutations, sign flips on the
  /// lateral entries (mirrored pairs collapse to sign-only because the plant
  /// has no left/right joint chains).
  static MirrorSpec reduced_plant();
};

Eigen::VectorXd mirror_state(const Eigen::VectorXd& obs, const MirrorSpec& spec);
Eigen::VectorXd mirror_action(const Eigen::VectorXd& act, const MirrorSpec& spec);

/// One PPO training tuple.
struct Sample {
  Eigen::VectorXd obs;
  Eigen::VectorXd act;
  double advantage = 0.0;
  double value_target = 0.0;
  double logp_old = 0.0;
};

/// Partial data augmentation: inserts the mirrored copy u(W) = {f(S), g(A),
/// Ad, V} directly after selected originals. Selection uses a fractional
/// accumulator so inserted/original = ratio exactly over the batch, e.g.
/// ratio 1/2 over {W1..W4} yields {W1, W2, u(W2), W3, W4, u(W4)}.
std::vector<Sample> augment_batch(const std::vector<Sample>& samples, double ratio,
                                  const MirrorSpec& spec);

/// Running per-index observation statistics, always updated with both an
/// observation and its mirror so paired indices carry sign-consistent
/// identical statistics and no asymmetrical bias enters the normalization.
class SharedNormStats {
 public:
  explicit SharedNormStats(int dim)
      : sum_(Eigen::VectorXd::Zero(dim)), sumsq_(Eigen::VectorXd::Zero(dim)) {}

  void update(const Eigen::VectorXd& obs, const MirrorSpec& spec);
  void merge(const SharedNormStats& other);

  Eigen::VectorXd mean() const;
  Eigen::VectorXd stddev() const;
  Eigen::VectorXd normalize(const Eigen::VectorXd& obs) const;

  std::uint64_t count() const { return count_; }
  int dim() const { return static_cast<int>(sum_.size()); }
  const Eigen::VectorXd& sum() const { return sum_; }
  const Eigen::VectorXd& sumsq() const { return sumsq_; }
  void restore(std::uint64_t count, const Eigen::VectorXd& sum, const Eigen::VectorXd& sumsq);

 private:
  std::uint64_t count_ = 0;
  Eigen::VectorXd sum_;
  Eigen::VectorXd sumsq_;
};

/// Mirrored Symmetry Index of one residual pair:
/// |d - d'|_1 / (0.5 * (|d|_1 + |d'|_1)); 0 when both are zero.
double msi(const Eigen::VectorXd& delta, const Eigen::VectorXd& delta_prime);

/// Mean MSI over a trajectory of raw observations. `policy` maps a raw
/// observation to the deterministic action vector; only the first
/// `n_residuals` components enter the index.
double trajectory_msi(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& policy,
                      const std::vector<Eigen::VectorXd>& trajectory, const MirrorSpec& spec,
                      int n_residuals);

}  // namespace bistab::symmetry
