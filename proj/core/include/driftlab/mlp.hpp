#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace driftlab {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// 3-layer perceptron k -> hidden -> hidden -> d, rectifier on hidden layers,
// linear output. Rows of a batch matrix are samples, so Y.data() doubles as a
// row-major particle buffer.
struct MlpGenerator {
  int in_dim = 2, hidden = 256, out_dim = 2;
  RowMat W1, W2, W3;  // (hidden,in), (hidden,hidden), (out,hidden)
  Eigen::VectorXd b1, b2, b3;

  static MlpGenerator init_he(int in_dim, int hidden, int out_dim, std::uint64_t seed);

  Eigen::Index param_count() const;
  Eigen::VectorXd params() const;             // flat [W1,b1,W2,b2,W3,b3]
  void set_params(const Eigen::VectorXd& p);  // inverse of params()
};

struct MlpCache {
  RowMat Z, H1, H2, Y;  // post-activation values
};

RowMat mlp_forward(const MlpGenerator& g, const RowMat& Z);
void mlp_forward_cached(const MlpGenerator& g, const RowMat& Z, MlpCache& cache);

struct MlpGrads {
  RowMat W1, W2, W3;
  Eigen::VectorXd b1, b2, b3;

  void resize_like(const MlpGenerator& g);
  Eigen::VectorXd flat() const;
};

// Backprop of dL/dY through the cached forward pass. Rectifier subgradient
// at 0 is 0.
void mlp_backward(const MlpGenerator& g, const MlpCache& cache, const RowMat& dY,
                  MlpGrads& grads);

// Mean squared error against constant targets (the stop-gradient loss):
//   L = (1/B) sum_i |y_i - t_i|^2,  dY = (2/B)(Y - T).
double stopgrad_loss_and_grad_out(const RowMat& Y, const RowMat& targets, RowMat& dY);

struct AdamState {
  Eigen::VectorXd m, v;
  long step = 0;

  void init(Eigen::Index n);
};

// Bias-corrected Adam update, in place.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
               double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps_adam = 1e-8);

}  // namespace driftlab
