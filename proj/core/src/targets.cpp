#include "driftlab/targets.hpp"

#include <cmath>
#include <stdexcept>

#include "driftlab/rng.hpp"

namespace driftlab {

void GaussianMixture::validate() const {
  if (dim <= 0) throw std::invalid_argument("GaussianMixture: dim must be positive");
  if (weights.empty()) throw std::invalid_argument("GaussianMixture: no components");
  if (means.size() != weights.size() * static_cast<std::size_t>(dim))
    throw std::invalid_argument("GaussianMixture: means shape mismatch");
  double s = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("GaussianMixture: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw std::invalid_argument("GaussianMixture: weights must sum to 1 within 1e-12");
  if (!(component_std > 0.0))
    throw std::invalid_argument("GaussianMixture: component_std must be positive");
  for (double v : means)
    if (!std::isfinite(v)) throw std::invalid_argument("GaussianMixture: non-finite mean");
}

GaussianMixture GaussianMixture::four_modes() {
  GaussianMixture m;
  m.dim = 2;
  m.weights = {0.25, 0.25, 0.25, 0.25};
  m.means = {1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0};
  m.component_std = 0.15;
  return m;
}

void IsotropicGaussian::validate() const {
  if (mean.empty()) throw std::invalid_argument("IsotropicGaussian: empty mean");
  if (!(std_dev > 0.0)) throw std::invalid_argument("IsotropicGaussian: std_dev must be positive");
}

ParticleSet sample_gmm(const GaussianMixture& m, std::size_t n, std::uint64_t seed) {
  m.validate();
  if (n == 0) throw std::invalid_argument("sample_gmm: n must be >= 1");
  Rng rng(seed);
  ParticleSet ps(static_cast<int>(n), m.dim);
  std::vector<double> cdf(m.weights.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < m.weights.size(); ++k) {
    acc += m.weights[k];
    cdf[k] = acc;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < cdf.size() && u > cdf[k]) ++k;
    auto mu = m.mean(k);
    auto p = ps.point(i);
    for (int j = 0; j < m.dim; ++j) p[j] = mu[j] + m.component_std * rng.normal();
  }
  return ps;
}

ParticleSet sample_gaussian(const IsotropicGaussian& g, std::size_t n, std::uint64_t seed) {
  g.validate();
  if (n == 0) throw std::invalid_argument("sample_gaussian: n must be >= 1");
  Rng rng(seed);
  ParticleSet ps(static_cast<int>(n), g.dim());
  for (std::size_t i = 0; i < n; ++i) {
    auto p = ps.point(i);
    for (int j = 0; j < g.dim(); ++j) p[j] = g.mean[j] + g.std_dev * rng.normal();
  }
  return ps;
}

bool checkerboard_contains(double u, double v) {
  if (u < -2.0 || u > 2.0 || v < -2.0 || v > 2.0) return false;
  const long a = static_cast<long>(std::floor(u));
  const long b = static_cast<long>(std::floor(v));
  // boundary u == 2.0 belongs to the last cell
  const long ia = std::min(a, 1l), ib = std::min(b, 1l);
  return ((ia + ib) % 2 + 2) % 2 == 0;
}

ParticleSet sample_checkerboard(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_checkerboard: n must be >= 1");
  // black cells of the 4x4 board over [-2,2]^2
  static constexpr int cells[8][2] = {{-2, -2}, {-2, 0}, {-1, -1}, {-1, 1},
                                      {0, -2},  {0, 0},  {1, -1},  {1, 1}};
  Rng rng(seed);
  ParticleSet ps(static_cast<int>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = rng.integer(8);
    auto p = ps.point(i);
    p[0] = cells[c][0] + rng.uniform();
    p[1] = cells[c][1] + rng.uniform();
  }
  return ps;
}

ParticleSet sample_swiss_roll(std::size_t n, std::uint64_t seed, double jitter) {
  if (n == 0) throw std::invalid_argument("sample_swiss_roll: n must be >= 1");
  Rng rng(seed);
  ParticleSet ps(static_cast<int>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = rng.uniform(swiss_roll_t_min, swiss_roll_t_max);
    auto p = ps.point(i);
    p[0] = swiss_roll_scale * t * std::cos(t) + jitter * rng.normal();
    p[1] = swiss_roll_scale * t * std::sin(t) + jitter * rng.normal();
  }
  return ps;
}

namespace {
// log-weights log w_k - |x-mu_k|^2/(2 s^2); shared constants omitted where
// they cancel (softmax) and restored for the log-density.
void gmm_log_weights(const GaussianMixture& m, double s2, std::span<const double> x,
                     std::vector<double>& lw) {
  lw.resize(m.components());
  for (std::size_t k = 0; k < m.components(); ++k) {
    auto mu = m.mean(k);
    double d2 = 0.0;
    for (int j = 0; j < m.dim; ++j) {
      const double d = x[j] - mu[j];
      d2 += d * d;
    }
    lw[k] = std::log(m.weights[k]) - d2 / (2.0 * s2);
  }
}
}  // namespace

std::vector<double> gmm_smoothed_score(const GaussianMixture& m, double sigma,
                                       std::span<const double> x) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gmm_smoothed_score: sigma must be positive");
  const double s2 = m.component_std * m.component_std + sigma * sigma;
  std::vector<double> lw;
  gmm_log_weights(m, s2, x, lw);
  double mx = lw[0];
  for (double v : lw) mx = std::max(mx, v);
  double den = 0.0;
  std::vector<double> score(m.dim, 0.0);
  for (std::size_t k = 0; k < m.components(); ++k) {
    const double w = std::exp(lw[k] - mx);
    den += w;
    auto mu = m.mean(k);
    for (int j = 0; j < m.dim; ++j) score[j] += w * (mu[j] - x[j]);
  }
  for (int j = 0; j < m.dim; ++j) score[j] /= s2 * den;
  return score;
}

double gmm_smoothed_log_density(const GaussianMixture& m, double sigma,
                                std::span<const double> x) {
  const double s2 = m.component_std * m.component_std + sigma * sigma;
  std::vector<double> lw;
  gmm_log_weights(m, s2, x, lw);
  double mx = lw[0];
  for (double v : lw) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : lw) sum += std::exp(v - mx);
  return mx + std::log(sum) - 0.5 * m.dim * std::log(2.0 * M_PI * s2);
}

std::vector<double> gaussian_smoothed_score(const IsotropicGaussian& g, double sigma,
                                            std::span<const double> x) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_smoothed_score: sigma must be >= 0");
  const double s2 = g.std_dev * g.std_dev + sigma * sigma;
  std::vector<double> score(g.dim());
  for (int j = 0; j < g.dim(); ++j) score[j] = -(x[j] - g.mean[j]) / s2;
  return score;
}

}  // namespace driftlab
