#include "driftlab/landscape.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "driftlab/detail/pairwise.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

std::size_t LandscapeResult::argmin_loss() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < loss.size(); ++i)
    if (loss[i] < loss[best]) best = i;
  return best;
}

void LandscapeResult::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << "alpha,beta,loss,sw\n";
  char buf[160];
  for (int ib = 0; ib < grid_n; ++ib)
    for (int ia = 0; ia < grid_n; ++ia) {
      const std::size_t idx = static_cast<std::size_t>(ib) * grid_n + ia;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", alpha[ia], beta[ib],
                    loss[idx], sw[idx]);
      out << buf;
    }
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> top2_pca_directions(
    const std::vector<Eigen::VectorXd>& snapshots, bool* degenerate, std::uint64_t seed) {
  const std::size_t S = snapshots.size();
  if (S < 2)
    throw std::invalid_argument("top2_pca_directions: need at least 2 gradient snapshots");
  const Eigen::Index P = snapshots[0].size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(P);
  for (const auto& s : snapshots) mean += s;
  mean /= static_cast<double>(S);

  Eigen::MatrixXd G(S, S);  // Gram of centered snapshots
  std::vector<Eigen::VectorXd> centered(S);
  for (std::size_t i = 0; i < S; ++i) centered[i] = snapshots[i] - mean;
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      G(i, j) = G(j, i) = centered[i].dot(centered[j]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  const Eigen::VectorXd evals = eig.eigenvalues();  // ascending
  const Eigen::MatrixXd evecs = eig.eigenvectors();

  auto direction_from = [&](Eigen::Index col) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(P);
    for (std::size_t i = 0; i < S; ++i) d += evecs(i, col) * centered[i];
    return d;
  };

  const Eigen::Index last = static_cast<Eigen::Index>(S) - 1;
  Eigen::VectorXd d1 = direction_from(last);
  const double n1 = d1.norm();
  if (!(n1 > 0.0))
    throw std::invalid_argument("top2_pca_directions: zero gradient variation");
  d1 /= n1;

  bool degen = evals(last - 1) <= std::max(0.0, 1e-12 * evals(last));
  Eigen::VectorXd d2;
  if (!degen) {
    d2 = direction_from(last - 1);
    d2 -= d1.dot(d2) * d1;
    const double n2 = d2.norm();
    if (n2 > 0.0)
      d2 /= n2;
    else
      degen = true;
  }
  if (degen) {
    Rng rng(mix_seed(seed, 97));
    d2.resize(P);
    do {
      for (Eigen::Index i = 0; i < P; ++i) d2(i) = rng.normal();
      d2 -= d1.dot(d2) * d1;
    } while (!(d2.norm() > 0.0));
    d2 /= d2.norm();
  }
  if (degenerate) *degenerate = degen;
  return {d1, d2};
}

LandscapeResult landscape_scan(const MlpGenerator& model,
                               const std::vector<Eigen::VectorXd>& gradient_snapshots,
                               const LandscapeConfig& cfg, const TargetSampler& sampler) {
  if (cfg.grid_n < 2) throw std::invalid_argument("landscape_scan: grid_n must be >= 2");
  LandscapeResult res;
  res.grid_n = cfg.grid_n;
  res.half_width = cfg.half_width;
  std::tie(res.d1, res.d2) =
      top2_pca_directions(gradient_snapshots, &res.degenerate_pca, cfg.seed);

  res.alpha.resize(cfg.grid_n);
  res.beta.resize(cfg.grid_n);
  for (int i = 0; i < cfg.grid_n; ++i) {
    const double t = -cfg.half_width + 2.0 * cfg.half_width * i / (cfg.grid_n - 1);
    res.alpha[i] = t;
    res.beta[i] = t;
  }
  res.loss.assign(static_cast<std::size_t>(cfg.grid_n) * cfg.grid_n, 0.0);
  res.sw.assign(res.loss.size(), 0.0);

  // shared evaluation data: one noise batch, one data batch, one SW pair
  const RowMat Z = sample_noise(cfg.eval_batch, model.in_dim, mix_seed(cfg.seed, 11));
  const ParticleSet data = sampler(cfg.eval_batch, mix_seed(cfg.seed, 12));
  const RowMat Zsw = sample_noise(cfg.sw_samples, model.in_dim, mix_seed(cfg.seed, 13));
  const ParticleSet data_sw = sampler(cfg.sw_samples, mix_seed(cfg.seed, 14));
  const std::uint64_t proj_seed = mix_seed(cfg.seed, 15);

  const Eigen::VectorXd base = model.params();
  MlpGenerator probe = model;
  RowMat V(cfg.eval_batch, model.out_dim);
  const double invB = 1.0 / static_cast<double>(cfg.eval_batch);

  for (int ib = 0; ib < cfg.grid_n; ++ib) {
    for (int ia = 0; ia < cfg.grid_n; ++ia) {
      const Eigen::VectorXd theta = base + res.alpha[ia] * res.d1 + res.beta[ib] * res.d2;
      probe.set_params(theta);
      const RowMat Y = mlp_forward(probe, Z);
      detail::mean_shift_field(Y.data(), cfg.eval_batch, data.data.data(), data.n(),
                               Y.data(), cfg.eval_batch, model.out_dim,
                               cfg.kernel_family, cfg.kernel_bandwidth, V.data(), nullptr);
      const std::size_t idx = static_cast<std::size_t>(ib) * cfg.grid_n + ia;
      res.loss[idx] = cfg.eta * cfg.eta * invB * V.squaredNorm();

      const RowMat Ysw = mlp_forward(probe, Zsw);
      ParticleSet gen(static_cast<int>(Ysw.rows()), static_cast<int>(Ysw.cols()));
      std::copy(Ysw.data(), Ysw.data() + Ysw.size(), gen.data.data());
      res.sw[idx] = sliced_wasserstein(gen, data_sw, cfg.sw_projections, proj_seed);
    }
  }
  return res;
}

}  // namespace driftlab
