#include "bistab/mlp.hpp"

#include <cmath>

namespace bistab::mlp {

namespace {

Eigen::MatrixXd xavier(int rows, int cols, Rng& rng, double scale) {
  const double limit = scale * std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform(-limit, limit);
  return m;
}

}  // namespace

MlpParams MlpParams::init(int in, int h1, int h2, int out, Rng& rng, double last_layer_scale) {
  MlpParams p;
  p.w1 = xavier(h1, in, rng, 1.0);
  p.w2 = xavier(h2, h1, rng, 1.0);
  p.w3 = xavier(out, h2, rng, last_layer_scale);
  p.b1 = Eigen::VectorXd::Zero(h1);
  p.b2 = Eigen::VectorXd::Zero(h2);
  p.b3 = Eigen::VectorXd::Zero(out);
  return p;
}

MlpGrads MlpGrads::zeros_like(const MlpParams& p) {
  MlpGrads g;
  g.w1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
  g.w2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
  g.w3 = Eigen::MatrixXd::Zero(p.w3.rows(), p.w3.cols());
  g.b1 = Eigen::VectorXd::Zero(p.b1.size());
  g.b2 = Eigen::VectorXd::Zero(p.b2.size());
  g.b3 = Eigen::VectorXd::Zero(p.b3.size());
  return g;
}

Eigen::MatrixXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& x, MlpCache* cache) {
  Eigen::MatrixXd h1 = ((p.w1 * x).colwise() + p.b1).array().tanh();
  Eigen::MatrixXd h2 = ((p.w2 * h1).colwise() + p.b2).array().tanh();
  Eigen::MatrixXd out = (p.w3 * h2).colwise() + p.b3;
  if (cache) {
    cache->x = x;
    cache->h1 = std::move(h1);
    cache->h2 = std::move(h2);
  }
  return out;
}

void mlp_backward(const MlpParams& p, const MlpCache& cache, const Eigen::MatrixXd& d_out,
                  MlpGrads& grads) {
  grads.w3 += d_out * cache.h2.transpose();
  grads.b3 += d_out.rowwise().sum();

  Eigen::MatrixXd d_h2 = p.w3.transpose() * d_out;
  d_h2.array() *= 1.0 - cache.h2.array().square();
  grads.w2 += d_h2 * cache.h1.transpose();
  grads.b2 += d_h2.rowwise().sum();

  Eigen::MatrixXd d_h1 = p.w2.transpose() * d_h2;
  d_h1.array() *= 1.0 - cache.h1.array().square();
  grads.w1 += d_h1 * cache.x.transpose();
  grads.b1 += d_h1.rowwise().sum();
}

std::vector<TensorRef> tensor_refs(MlpParams& p, const MlpGrads* g) {
  std::vector<TensorRef> refs;
  refs.push_back({p.w1.data(), g ? g->w1.data() : nullptr, p.w1.size()});
  refs.push_back({p.b1.data(), g ? g->b1.data() : nullptr, p.b1.size()});
  refs.push_back({p.w2.data(), g ? g->w2.data() : nullptr, p.w2.size()});
  refs.push_back({p.b2.data(), g ? g->b2.data() : nullptr, p.b2.size()});
  refs.push_back({p.w3.data(), g ? g->w3.data() : nullptr, p.w3.size()});
  refs.push_back({p.b3.data(), g ? g->b3.data() : nullptr, p.b3.size()});
  return refs;
}

}  // namespace bistab::mlp
