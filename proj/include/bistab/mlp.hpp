#pragma once

#include <vector>

#include <Eigen/Core>

#include "bistab/rng.hpp"

namespace bistab::mlp {

/// Two-hidden-layer perceptron with tanh activations. Batches are stored
/// column-wise (one sample per column).
struct MlpParams {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  static MlpParams init(int in, int h1, int h2, int out, Rng& rng, double last_layer_scale = 1.0);

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int output_dim() const { return static_cast<int>(w3.rows()); }
};

struct MlpCache {
  Eigen::MatrixXd x;   // input
  Eigen::MatrixXd h1;  // post-tanh
  Eigen::MatrixXd h2;  // post-tanh
};

struct MlpGrads {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  static MlpGrads zeros_like(const MlpParams& p);
};

Eigen::MatrixXd mlp_forward(const MlpParams& p, const Eigen::MatrixXd& x, MlpCache* cache = nullptr);

/// Exact backpropagation; accumulates into `grads`.
void mlp_backward(const MlpParams& p, const MlpCache& cache, const Eigen::MatrixXd& d_out,
                  MlpGrads& grads);

/// Flat views over every tensor of a params/grads pair, in a fixed order.
/// Used by the optimizer, finite-difference checks, and checkpointing.
struct TensorRef {
  double* value;
  const double* grad;
  Eigen::Index size;
};

std::vector<TensorRef> tensor_refs(MlpParams& p, const MlpGrads* g = nullptr);

}  // namespace bistab::mlp
