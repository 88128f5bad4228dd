#include "driftlab/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "driftlab/parallel.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

namespace {
constexpr std::size_t kRowGrain = 256;

// C = A * B^T over batch-row chunks (A: (B,k), Bmat: (r,k), C: (B,r)).
void gemm_nt(const RowMat& A, const RowMat& B, RowMat& C) {
  C.resize(A.rows(), B.rows());
  parallel_chunks(static_cast<std::size_t>(A.rows()), kRowGrain,
                  [&](std::size_t, std::size_t b, std::size_t e) {
                    const auto rows = static_cast<Eigen::Index>(e - b);
                    C.middleRows(static_cast<Eigen::Index>(b), rows).noalias() =
                        A.middleRows(static_cast<Eigen::Index>(b), rows) * B.transpose();
                  });
}

// C = A^T * B, reduction over batch rows; chunk partials folded in order.
void gemm_tn(const RowMat& A, const RowMat& B, RowMat& C) {
  const std::size_t nchunks = chunk_count(static_cast<std::size_t>(A.rows()), kRowGrain);
  std::vector<RowMat> parts(nchunks);
  parallel_chunks(static_cast<std::size_t>(A.rows()), kRowGrain,
                  [&](std::size_t ci, std::size_t b, std::size_t e) {
                    const auto rows = static_cast<Eigen::Index>(e - b);
                    parts[ci].noalias() =
                        A.middleRows(static_cast<Eigen::Index>(b), rows).transpose() *
                        B.middleRows(static_cast<Eigen::Index>(b), rows);
                  });
  C = RowMat::Zero(A.cols(), B.cols());
  for (const auto& p : parts) C += p;
}
}  // namespace

MlpGenerator MlpGenerator::init_he(int in_dim, int hidden, int out_dim,
                                   std::uint64_t seed) {
  MlpGenerator g;
  g.in_dim = in_dim;
  g.hidden = hidden;
  g.out_dim = out_dim;
  Rng rng(seed);
  auto fill = [&](RowMat& W, int rows, int cols) {
    W.resize(rows, cols);
    const double s = std::sqrt(2.0 / cols);
    for (Eigen::Index i = 0; i < W.rows(); ++i)
      for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = s * rng.normal();
  };
  fill(g.W1, hidden, in_dim);
  fill(g.W2, hidden, hidden);
  fill(g.W3, out_dim, hidden);
  g.b1 = Eigen::VectorXd::Zero(hidden);
  g.b2 = Eigen::VectorXd::Zero(hidden);
  g.b3 = Eigen::VectorXd::Zero(out_dim);
  return g;
}

Eigen::Index MlpGenerator::param_count() const {
  return W1.size() + b1.size() + W2.size() + b2.size() + W3.size() + b3.size();
}

Eigen::VectorXd MlpGenerator::params() const {
  Eigen::VectorXd p(param_count());
  Eigen::Index o = 0;
  auto put = [&](const double* src, Eigen::Index n) {
    std::copy(src, src + n, p.data() + o);
    o += n;
  };
  put(W1.data(), W1.size());
  put(b1.data(), b1.size());
  put(W2.data(), W2.size());
  put(b2.data(), b2.size());
  put(W3.data(), W3.size());
  put(b3.data(), b3.size());
  return p;
}

void MlpGenerator::set_params(const Eigen::VectorXd& p) {
  if (p.size() != param_count())
    throw std::invalid_argument("MlpGenerator::set_params: size mismatch");
  Eigen::Index o = 0;
  auto take = [&](double* dst, Eigen::Index n) {
    std::copy(p.data() + o, p.data() + o + n, dst);
    o += n;
  };
  take(W1.data(), W1.size());
  take(b1.data(), b1.size());
  take(W2.data(), W2.size());
  take(b2.data(), b2.size());
  take(W3.data(), W3.size());
  take(b3.data(), b3.size());
}

void mlp_forward_cached(const MlpGenerator& g, const RowMat& Z, MlpCache& cache) {
  if (Z.cols() != g.in_dim) throw std::invalid_argument("mlp_forward: input dim mismatch");
  cache.Z = Z;
  gemm_nt(Z, g.W1, cache.H1);
  cache.H1.rowwise() += g.b1.transpose();
  cache.H1 = cache.H1.cwiseMax(0.0);
  gemm_nt(cache.H1, g.W2, cache.H2);
  cache.H2.rowwise() += g.b2.transpose();
  cache.H2 = cache.H2.cwiseMax(0.0);
  gemm_nt(cache.H2, g.W3, cache.Y);
  cache.Y.rowwise() += g.b3.transpose();
}

RowMat mlp_forward(const MlpGenerator& g, const RowMat& Z) {
  MlpCache c;
  mlp_forward_cached(g, Z, c);
  return std::move(c.Y);
}

void MlpGrads::resize_like(const MlpGenerator& g) {
  W1.resize(g.W1.rows(), g.W1.cols());
  W2.resize(g.W2.rows(), g.W2.cols());
  W3.resize(g.W3.rows(), g.W3.cols());
  b1.resize(g.b1.size());
  b2.resize(g.b2.size());
  b3.resize(g.b3.size());
}

Eigen::VectorXd MlpGrads::flat() const {
  Eigen::VectorXd p(W1.size() + b1.size() + W2.size() + b2.size() + W3.size() + b3.size());
  Eigen::Index o = 0;
  auto put = [&](const double* src, Eigen::Index n) {
    std::copy(src, src + n, p.data() + o);
    o += n;
  };
  put(W1.data(), W1.size());
  put(b1.data(), b1.size());
  put(W2.data(), W2.size());
  put(b2.data(), b2.size());
  put(W3.data(), W3.size());
  put(b3.data(), b3.size());
  return p;
}

void mlp_backward(const MlpGenerator& g, const MlpCache& cache, const RowMat& dY,
                  MlpGrads& grads) {
  if (dY.rows() != cache.Y.rows() || dY.cols() != cache.Y.cols())
    throw std::invalid_argument("mlp_backward: dY shape mismatch");
  gemm_tn(dY, cache.H2, grads.W3);
  grads.b3 = dY.colwise().sum();

  RowMat dH2;
  gemm_nt(dY, RowMat(g.W3.transpose()), dH2);  // dY * W3
  dH2 = dH2.cwiseProduct((cache.H2.array() > 0.0).cast<double>().matrix());
  gemm_tn(dH2, cache.H1, grads.W2);
  grads.b2 = dH2.colwise().sum();

  RowMat dH1;
  gemm_nt(dH2, RowMat(g.W2.transpose()), dH1);  // dH2 * W2
  dH1 = dH1.cwiseProduct((cache.H1.array() > 0.0).cast<double>().matrix());
  gemm_tn(dH1, cache.Z, grads.W1);
  grads.b1 = dH1.colwise().sum();
}

double stopgrad_loss_and_grad_out(const RowMat& Y, const RowMat& targets, RowMat& dY) {
  if (Y.rows() != targets.rows() || Y.cols() != targets.cols())
    throw std::invalid_argument("stopgrad loss: shape mismatch");
  const double invB = 1.0 / static_cast<double>(Y.rows());
  dY = 2.0 * invB * (Y - targets);
  return invB * (Y - targets).squaredNorm();
}

void AdamState::init(Eigen::Index n) {
  m = Eigen::VectorXd::Zero(n);
  v = Eigen::VectorXd::Zero(n);
  step = 0;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
               double lr, double beta1, double beta2, double eps_adam) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: size mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  state.m = beta1 * state.m + (1.0 - beta1) * grads;
  state.v = beta2 * state.v.array().matrix() + (1.0 - beta2) * grads.cwiseProduct(grads);
  params.array() -=
      lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + eps_adam);
}

}  // namespace driftlab
