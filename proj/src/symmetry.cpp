#include "bistab/symmetry.hpp"

#include <cmath>

namespace bistab::symmetry {

namespace {

void validate_table(const std::vector<int>& perm, const Eigen::VectorXd& sign, const char* what) {
  const int n = static_cast<int>(perm.size());
  if (sign.size() != n) throw std::invalid_argument(std::string(what) + ": table size mismatch");
  for (int i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n)
      throw std::invalid_argument(std::string(what) + ": permutation index out of range");
    if (sign[i] != 1.0 && sign[i] != -1.0)
      throw std::invalid_argument(std::string(what) + ": signs must be +-1");
    // Involution: applying the table twice must return the original vector.
    if (perm[perm[i]] != i || sign[i] * sign[perm[i]] != 1.0)
      throw std::invalid_argument(std::string(what) + ": table is not an involution");
  }
}

Eigen::VectorXd apply_table(const Eigen::VectorXd& v, const std::vector<int>& perm,
                            const Eigen::VectorXd& sign) {
  if (v.size() != static_cast<Eigen::Index>(perm.size()))
    throw std::invalid_argument("mirror: vector dimension mismatch");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = sign[i] * v[perm[i]];
  return out;
}

}  // namespace

void MirrorSpec::validate() const {
  validate_table(obs_perm, obs_sign, "MirrorSpec obs");
  validate_table(act_perm, act_sign, "MirrorSpec act");
}

MirrorSpec MirrorSpec::reduced_plant() {
  MirrorSpec spec;
  spec.obs_perm.resize(16);
  spec.act_perm.resize(12);
  for (int i = 0; i < 16; ++i) spec.obs_perm[i] = i;
  for (int i = 0; i < 12; ++i) spec.act_perm[i] = i;

  spec.obs_sign = Eigen::VectorXd::Ones(16);
  // Lateral quantities invert: y of COM offset, velocity, zmp, swing; roll
  // angle and rate; support side.
  for (int i : {1, 4, 7, 9, 11, 13, 15}) spec.obs_sign[i] = -1.0;

  spec.act_sign = Eigen::VectorXd::Ones(12);
  // delta_zmp_y, tau_roll, delta_step_y invert; sagittal residuals, height,
  // step time, and all gains are unchanged.
  for (int i : {1, 3, 5}) spec.act_sign[i] = -1.0;
  return spec;
}

Eigen::VectorXd mirror_state(const Eigen::VectorXd& obs, const MirrorSpec& spec) {
  return apply_table(obs, spec.obs_perm, spec.obs_sign);
}

Eigen::VectorXd mirror_action(const Eigen::VectorXd& act, const MirrorSpec& spec) {
  return apply_table(act, spec.act_perm, spec.act_sign);
}

std::vector<Sample> augment_batch(const std::vector<Sample>& samples, double ratio,
                                  const MirrorSpec& spec) {
  if (ratio < 0.0 || ratio > 1.0) throw std::invalid_argument("augment_batch: ratio outside [0,1]");
  std::vector<Sample> out;
  out.reserve(samples.size() + static_cast<std::size_t>(ratio * samples.size()) + 1);
  double acc = 0.0;
  for (const auto& w : samples) {
    out.push_back(w);
    acc += ratio;
    if (acc >= 1.0 - 1e-12) {
      acc -= 1.0;
      Sample u;
      u.obs = mirror_state(w.obs, spec);
      u.act = mirror_action(w.act, spec);
      u.advantage = w.advantage;
      u.value_target = w.value_target;
      u.logp_old = w.logp_old;  // recomputed by the learner before use
      out.push_back(std::move(u));
    }
  }
  return out;
}

void SharedNormStats::update(const Eigen::VectorXd& obs, const MirrorSpec& spec) {
  const Eigen::VectorXd mirrored = mirror_state(obs, spec);
  sum_ += obs;
  sumsq_ += obs.cwiseAbs2();
  sum_ += mirrored;
  sumsq_ += mirrored.cwiseAbs2();
  count_ += 2;
}

void SharedNormStats::merge(const SharedNormStats& other) {
  sum_ += other.sum_;
  sumsq_ += other.sumsq_;
  count_ += other.count_;
}

Eigen::VectorXd SharedNormStats::mean() const {
  if (count_ == 0) return Eigen::VectorXd::Zero(sum_.size());
  return sum_ / static_cast<double>(count_);
}

Eigen::VectorXd SharedNormStats::stddev() const {
  if (count_ < 2) return Eigen::VectorXd::Ones(sum_.size());
  const double n = static_cast<double>(count_);
  const Eigen::VectorXd var = (sumsq_ / n - (sum_ / n).cwiseAbs2()).cwiseMax(1e-8);
  return var.cwiseSqrt();
}

Eigen::VectorXd SharedNormStats::normalize(const Eigen::VectorXd& obs) const {
  if (count_ < 2) return obs;
  Eigen::VectorXd z = (obs - mean()).cwiseQuotient(stddev());
  return z.cwiseMax(-10.0).cwiseMin(10.0);
}

void SharedNormStats::restore(std::uint64_t count, const Eigen::VectorXd& sum,
                              const Eigen::VectorXd& sumsq) {
  count_ = count;
  sum_ = sum;
  sumsq_ = sumsq;
}

double msi(const Eigen::VectorXd& delta, const Eigen::VectorXd& delta_prime) {
  if (delta.size() != delta_prime.size()) throw std::invalid_argument("msi: dimension mismatch");
  const double denom = 0.5 * (delta.lpNorm<1>() + delta_prime.lpNorm<1>());
  if (denom == 0.0) return 0.0;  // both zero: symmetric by convention
  return (delta - delta_prime).lpNorm<1>() / denom;
}

double trajectory_msi(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& policy,
                      const std::vector<Eigen::VectorXd>& trajectory, const MirrorSpec& spec,
                      int n_residuals) {
  if (trajectory.empty()) throw std::invalid_argument("trajectory_msi: empty trajectory");
  double total = 0.0;
  for (const auto& obs : trajectory) {
    const Eigen::VectorXd delta = policy(obs).head(n_residuals);
    // g is an involution, so g^-1 of the mirrored-state action is g itself.
    const Eigen::VectorXd delta_prime =
        mirror_action(policy(mirror_state(obs, spec)), spec).head(n_residuals);
    total += msi(delta, delta_prime);
  }
  return total / static_cast<double>(trajectory.size());
}

}  // namespace bistab::symmetry
