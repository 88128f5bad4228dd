#include <doctest.h>

#include <cmath>

#include "driftlab/detail/pairwise.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/rng.hpp"
#include "driftlab/targets.hpp"
#include "driftlab/train.hpp"

using namespace driftlab;

namespace {

double coupled_loss_at(const MlpGenerator& g, const RowMat& Z, const ParticleSet& data,
                       KernelFamily fam, double bw, double eta) {
  const RowMat Y = mlp_forward(g, Z);
  const std::size_t B = Y.rows();
  RowMat V(B, Y.cols()), dY(B, Y.cols());
  double loss = 0.0;
  detail::coupled_loss_and_input_grad(Y.data(), B, data.data.data(), data.n(),
                                      static_cast<int>(Y.cols()), fam, bw, eta, V.data(),
                                      &loss, dY.data());
  return loss;
}

TargetSampler checkerboard_sampler() {
  return [](std::size_t n, std::uint64_t seed) { return sample_checkerboard(n, seed); };
}

}  // namespace

TEST_CASE("coupled gradient matches finite differences through the full graph") {
  for (KernelFamily fam : {KernelFamily::Gaussian, KernelFamily::Laplacian}) {
    CAPTURE(static_cast<int>(fam));
    MlpGenerator g = MlpGenerator::init_he(2, 8, 2, 301);
    const RowMat Z = sample_noise(16, 2, 302);
    const ParticleSet data = sample_checkerboard(16, 303);
    const double bw = 0.3, eta = 0.7;

    MlpCache cache;
    mlp_forward_cached(g, Z, cache);
    RowMat V(16, 2), dY(16, 2);
    double loss = 0.0;
    detail::coupled_loss_and_input_grad(cache.Y.data(), 16, data.data.data(), data.n(), 2,
                                        fam, bw, eta, V.data(), &loss, dY.data());
    MlpGrads grads;
    grads.resize_like(g);
    mlp_backward(g, cache, dY, grads);
    const Eigen::VectorXd analytic = grads.flat();

    const Eigen::VectorXd theta = g.params();
    MlpGenerator probe = g;
    const double h = 1e-5;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp(i) += h;
      tm(i) -= h;
      probe.set_params(tp);
      const double lp = coupled_loss_at(probe, Z, data, fam, bw, eta);
      probe.set_params(tm);
      const double lm = coupled_loss_at(probe, Z, data, fam, bw, eta);
      const double fd = (lp - lm) / (2.0 * h);
      const double scale = std::max({1e-7, std::abs(fd), std::abs(analytic(i))});
      const double rel = std::abs(analytic(i) - fd) / scale;
      worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("coupled loss and gradient vanish when p equals the generated batch") {
  MlpGenerator g = MlpGenerator::init_he(2, 8, 2, 310);
  const RowMat Z = sample_noise(12, 2, 311);
  const RowMat Y = mlp_forward(g, Z);
  ParticleSet injected(12, 2);
  std::copy(Y.data(), Y.data() + Y.size(), injected.data.data());

  RowMat V(12, 2), dY(12, 2);
  double loss = 1.0;
  detail::coupled_loss_and_input_grad(Y.data(), 12, injected.data.data(), 12, 2,
                                      KernelFamily::Gaussian, 0.3, 1.0, V.data(), &loss,
                                      dY.data());
  CHECK(loss == 0.0);
  CHECK(V.cwiseAbs().maxCoeff() == 0.0);
  CHECK(dY.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stop-gradient step gradient equals the regression-on-targets gradient") {
  MlpGenerator g = MlpGenerator::init_he(2, 16, 2, 320);
  const RowMat Z = sample_noise(64, 2, 321);
  const ParticleSet data = sample_checkerboard(64, 322);
  const double eta = 1.0;

  MlpCache cache;
  mlp_forward_cached(g, Z, cache);
  RowMat V(64, 2);
  detail::mean_shift_field(cache.Y.data(), 64, data.data.data(), 64, cache.Y.data(), 64, 2,
                           KernelFamily::Laplacian, 0.05, V.data(), nullptr);
  // targets computed once and cached as constants
  const RowMat targets = cache.Y + eta * V;
  RowMat dY_direct;
  (void)stopgrad_loss_and_grad_out(cache.Y, targets, dY_direct);
  const RowMat dY_drift = (-2.0 * eta / 64.0) * V;
  CHECK((dY_direct - dY_drift).cwiseAbs().maxCoeff() < 1e-16);
}

TEST_CASE("training is deterministic under a fixed seed") {
  TrainConfig tc;
  tc.batch = 64;
  tc.steps = 30;
  tc.hidden = 16;
  tc.metric_cadence = 10;
  tc.sw_samples = 128;
  tc.sw_projections = 16;
  const TrainResult a = train(tc, checkerboard_sampler(), 9);
  const TrainResult b = train(tc, checkerboard_sampler(), 9);
  const TrainResult c = train(tc, checkerboard_sampler(), 10);
  CHECK(a.model.params() == b.model.params());
  REQUIRE(a.history.records.size() == b.history.records.size());
  for (std::size_t i = 0; i < a.history.records.size(); ++i) {
    CHECK(a.history.records[i].sliced_w == b.history.records[i].sliced_w);
    CHECK(a.history.records[i].loss == b.history.records[i].loss);
  }
  CHECK(a.model.params() != c.model.params());
}

TEST_CASE("short stop-gradient run reduces SW and drift norm") {
  TrainConfig tc;
  tc.batch = 256;
  tc.steps = 400;
  tc.hidden = 64;
  tc.metric_cadence = 100;
  tc.sw_samples = 1000;
  tc.sw_projections = 64;
  const TrainResult res = train(tc, checkerboard_sampler(), 33);
  REQUIRE_FALSE(res.nan_abort);
  REQUIRE(res.history.records.size() >= 3);
  const auto& first = res.history.records.front();
  CHECK(res.final_sw < first.sliced_w);
  CHECK(res.final_drift_norm < first.mean_drift_norm);
}

TEST_CASE("NaN loss aborts with a diagnostic step index") {
  TrainConfig tc;
  tc.batch = 32;
  tc.steps = 50;
  tc.hidden = 8;
  tc.metric_cadence = 10;
  tc.sw_samples = 64;
  tc.sw_projections = 8;
  tc.lr = 1e305;  // drives parameters to overflow within a couple of steps
  const TrainResult res = train(tc, checkerboard_sampler(), 2);
  CHECK(res.nan_abort);
  CHECK(res.nan_step >= 0);
  CHECK(res.nan_step < tc.steps);
}

TEST_CASE("config validation rejects sinkhorn coupled mode and bad fields") {
  TrainConfig tc;
  tc.backend = DriftBackend::Sinkhorn;
  tc.loss_mode = LossMode::Coupled;
  CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
  TrainConfig bad;
  bad.lr = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("checkpoint round-trip preserves parameters") {
  const MlpGenerator g = MlpGenerator::init_he(2, 16, 2, 900);
  const auto path = std::string("/tmp/driftlab_ckpt_test.bin");
  save_checkpoint(g, path, 900, 123);
  const MlpGenerator back = load_checkpoint(path);
  CHECK(back.params() == g.params());
  CHECK(back.hidden == 16);
}
