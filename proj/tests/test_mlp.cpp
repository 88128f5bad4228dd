#include <doctest.h>

#include <cmath>

#include "driftlab/mlp.hpp"
#include "driftlab/train.hpp"
#include "driftlab/rng.hpp"

using namespace driftlab;

namespace {
double mse_loss(const MlpGenerator& g, const RowMat& Z, const RowMat& T) {
  const RowMat Y = mlp_forward(g, Z);
  return (Y - T).squaredNorm() / static_cast<double>(Y.rows());
}
}  // namespace

TEST_CASE("all-zero parameters map everything to zero") {
  MlpGenerator g = MlpGenerator::init_he(2, 16, 2, 1);
  g.set_params(Eigen::VectorXd::Zero(g.param_count()));
  const RowMat Z = sample_noise(8, 2, 3);
  const RowMat Y = mlp_forward(g, Z);
  CHECK(Y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hand-built pass-through recovers positive inputs") {
  MlpGenerator g = MlpGenerator::init_he(2, 4, 2, 1);
  g.W1.setZero();
  g.W1(0, 0) = 1.0;
  g.W1(1, 1) = 1.0;
  g.W2.setZero();
  for (int i = 0; i < 4; ++i) g.W2(i, i) = 1.0;
  g.W3.setZero();
  g.W3(0, 0) = 1.0;
  g.W3(1, 1) = 1.0;
  g.b1.setZero();
  g.b2.setZero();
  g.b3.setZero();
  RowMat Z(3, 2);
  Z << 0.5, 1.25, 2.0, 0.125, 3.5, 4.0;
  const RowMat Y = mlp_forward(g, Z);
  CHECK((Y - Z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parameter round-trip through the flat vector") {
  const MlpGenerator g = MlpGenerator::init_he(3, 8, 2, 5);
  MlpGenerator h = MlpGenerator::init_he(3, 8, 2, 6);
  h.set_params(g.params());
  CHECK(h.W2 == g.W2);
  CHECK(h.b3 == g.b3);
}

TEST_CASE("backprop matches central finite differences on a small net") {
  MlpGenerator g = MlpGenerator::init_he(2, 8, 2, 42);
  const RowMat Z = sample_noise(4, 2, 43);
  RowMat T = sample_noise(4, 2, 44);

  MlpCache cache;
  mlp_forward_cached(g, Z, cache);
  RowMat dY;
  (void)stopgrad_loss_and_grad_out(cache.Y, T, dY);
  MlpGrads grads;
  grads.resize_like(g);
  mlp_backward(g, cache, dY, grads);
  const Eigen::VectorXd analytic = grads.flat();

  Eigen::VectorXd theta = g.params();
  const double h = 1e-5;
  MlpGenerator probe = g;
  int checked = 0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    probe.set_params(tp);
    const double lp = mse_loss(probe, Z, T);
    probe.set_params(tm);
    const double lm = mse_loss(probe, Z, T);
    const double fd = (lp - lm) / (2.0 * h);
    const double scale = std::max({1e-6, std::abs(fd), std::abs(analytic(i))});
    CHECK(std::abs(analytic(i) - fd) / scale < 1e-4);
    ++checked;
  }
  CHECK(checked == g.param_count());
}

TEST_CASE("stop-gradient loss vanishes when targets equal outputs") {
  MlpGenerator g = MlpGenerator::init_he(2, 8, 2, 7);
  const RowMat Z = sample_noise(16, 2, 8);
  MlpCache cache;
  mlp_forward_cached(g, Z, cache);
  RowMat dY;
  const double loss = stopgrad_loss_and_grad_out(cache.Y, cache.Y, dY);
  CHECK(loss == 0.0);
  CHECK(dY.cwiseAbs().maxCoeff() == 0.0);
  MlpGrads grads;
  grads.resize_like(g);
  mlp_backward(g, cache, dY, grads);
  CHECK(grads.flat().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("last-layer gradient equals the closed-form least-squares gradient") {
  MlpGenerator g = MlpGenerator::init_he(2, 8, 2, 17);
  const RowMat Z = sample_noise(1, 2, 18);
  const RowMat T = sample_noise(1, 2, 19);
  MlpCache cache;
  mlp_forward_cached(g, Z, cache);
  RowMat dY;
  (void)stopgrad_loss_and_grad_out(cache.Y, T, dY);
  MlpGrads grads;
  grads.resize_like(g);
  mlp_backward(g, cache, dY, grads);
  // single sample: dW3 = 2 (y - t) h2^T
  const RowMat expected =
      2.0 * (cache.Y - T).transpose() * cache.H2;
  CHECK((grads.W3 - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("adam zero gradient leaves parameters unchanged") {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(10, 1.5);
  const Eigen::VectorXd p0 = p;
  AdamState st;
  st.init(10);
  adam_step(p, Eigen::VectorXd::Zero(10), st, 1e-3);
  CHECK(p == p0);
}

TEST_CASE("adam first step is a sign-scaled step of magnitude lr") {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd gvec(3);
  gvec << 3.0, -0.25, 1e-3;
  AdamState st;
  st.init(3);
  adam_step(p, gvec, st, 1e-3);
  for (int i = 0; i < 3; ++i)
    CHECK(p(i) == doctest::Approx(-1e-3 * (gvec(i) > 0 ? 1.0 : -1.0)).epsilon(1e-4));
}

TEST_CASE("adam runs are deterministic") {
  auto run = [] {
    MlpGenerator g = MlpGenerator::init_he(2, 8, 2, 100);
    Eigen::VectorXd p = g.params();
    AdamState st;
    st.init(p.size());
    Rng rng(5);
    for (int s = 0; s < 100; ++s) {
      Eigen::VectorXd grad(p.size());
      for (Eigen::Index i = 0; i < grad.size(); ++i) grad(i) = rng.normal();
      adam_step(p, grad, st, 1e-3);
    }
    return p;
  };
  const Eigen::VectorXd a = run(), b = run();
  CHECK(a == b);
}
