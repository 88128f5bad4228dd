#include "driftlab/drift.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "driftlab/detail/pairwise.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

namespace {
void check_inputs(std::span<const double> x, const ParticleSet& p, const ParticleSet& q,
                  const KernelSpec& spec) {
  spec.validate();
  if (p.n() == 0 || q.n() == 0)
    throw std::invalid_argument("mean_shift_drift: empty sample set");
  if (p.dim != spec.dim || q.dim != spec.dim || static_cast<int>(x.size()) != spec.dim)
    throw std::invalid_argument("mean_shift_drift: dimension mismatch");
}
}  // namespace

DriftVector mean_shift_drift(std::span<const double> x, const ParticleSet& p_samples,
                             const ParticleSet& q_samples, const KernelSpec& spec) {
  check_inputs(x, p_samples, q_samples, spec);
  DriftVector out;
  out.v.resize(spec.dim);
  std::vector<double> ta(spec.dim), tb(spec.dim);
  const bool fa = detail::mean_shift_term(x.data(), p_samples.data.data(), p_samples.n(),
                                          spec.dim, spec.family, spec.bandwidth, ta.data());
  const bool fb = detail::mean_shift_term(x.data(), q_samples.data.data(), q_samples.n(),
                                          spec.dim, spec.family, spec.bandwidth, tb.data());
  for (int j = 0; j < spec.dim; ++j) out.v[j] = ta[j] - tb[j];
  out.far_from_support = fa || fb;
  return out;
}

DriftVector multiscale_drift(std::span<const double> x, const ParticleSet& p_samples,
                             const ParticleSet& q_samples,
                             std::span<const KernelSpec> specs) {
  if (specs.empty()) throw std::invalid_argument("multiscale_drift: no kernel specs");
  DriftVector total;
  total.v.assign(specs[0].dim, 0.0);
  for (const auto& spec : specs) {
    DriftVector one = mean_shift_drift(x, p_samples, q_samples, spec);
    for (std::size_t j = 0; j < total.v.size(); ++j) total.v[j] += one.v[j];
    total.far_from_support = total.far_from_support || one.far_from_support;
  }
  return total;
}

std::vector<double> analytic_gaussian_drift(std::span<const double> x,
                                            const GaussianMixture& p,
                                            const IsotropicGaussian& q, double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("analytic_gaussian_drift: sigma must be positive");
  auto sp = gmm_smoothed_score(p, sigma, x);
  auto sq = gaussian_smoothed_score(q, sigma, x);
  for (std::size_t j = 0; j < sp.size(); ++j) sp[j] = sigma * sigma * (sp[j] - sq[j]);
  return sp;
}

bool DriftField::any_far() const {
  for (auto f : far_flags)
    if (f) return true;
  return false;
}

void DriftField::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  const int d = probes.dim;
  for (int j = 0; j < d; ++j) out << "x" << j << ",";
  for (int j = 0; j < d; ++j) out << "v" << j << ",";
  out << "far\n";
  char buf[40];
  for (std::size_t i = 0; i < probes.n(); ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", probes.data[i * d + j]);
      out << buf << ',';
    }
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", vectors.data[i * d + j]);
      out << buf << ',';
    }
    out << int(far_flags.empty() ? 0 : far_flags[i]) << '\n';
  }
}

DriftField mean_shift_drift_field(const ParticleSet& probes, const ParticleSet& p_samples,
                                  const ParticleSet& q_samples, const KernelSpec& spec) {
  check_inputs(probes.point(0), p_samples, q_samples, spec);
  DriftField f;
  f.probes = probes;
  f.vectors = ParticleSet(static_cast<int>(probes.n()), spec.dim);
  f.far_flags.assign(probes.n(), 0);
  detail::mean_shift_field(probes.data.data(), probes.n(), p_samples.data.data(),
                           p_samples.n(), q_samples.data.data(), q_samples.n(), spec.dim,
                           spec.family, spec.bandwidth, f.vectors.data.data(),
                           f.far_flags.data());
  return f;
}

ParticleSet probe_grid_2d(int nx, int ny, double x0, double x1, double y0, double y1) {
  ParticleSet g(nx * ny, 2);
  std::size_t idx = 0;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      g.data[idx++] = nx == 1 ? x0 : x0 + (x1 - x0) * ix / (nx - 1);
      g.data[idx++] = ny == 1 ? y0 : y0 + (y1 - y0) * iy / (ny - 1);
    }
  return g;
}

ScoreIdentityReport verify_score_identity(const GaussianMixture& p, const IsotropicGaussian& q,
                                          double sigma, std::size_t n_samples,
                                          const ParticleSet& probe_grid, std::uint64_t seed) {
  if (n_samples < 1000)
    throw std::invalid_argument("verify_score_identity: n_samples must be >= 1000");
  ScoreIdentityReport rep;
  rep.n_samples = n_samples;
  rep.sigma = sigma;
  rep.seed = seed;

  const ParticleSet ps = sample_gmm(p, n_samples, mix_seed(seed, 1));
  const ParticleSet qs = sample_gaussian(q, n_samples, mix_seed(seed, 2));
  KernelSpec spec{KernelFamily::Gaussian, sigma, p.dim};
  rep.empirical = mean_shift_drift_field(probe_grid, ps, qs, spec);

  rep.analytic.probes = probe_grid;
  rep.analytic.vectors = ParticleSet(static_cast<int>(probe_grid.n()), p.dim);
  rep.analytic.far_flags.assign(probe_grid.n(), 0);
  rep.errors.resize(probe_grid.n());
  double sum = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < probe_grid.n(); ++i) {
    const auto v = analytic_gaussian_drift(probe_grid.point(i), p, q, sigma);
    double e2 = 0.0;
    for (int j = 0; j < p.dim; ++j) {
      rep.analytic.vectors.data[i * p.dim + j] = v[j];
      const double d = rep.empirical.vectors.data[i * p.dim + j] - v[j];
      e2 += d * d;
    }
    rep.errors[i] = std::sqrt(e2);
    sum += rep.errors[i];
    mx = std::max(mx, rep.errors[i]);
  }
  rep.mean_error = sum / probe_grid.n();
  rep.max_error = mx;
  return rep;
}

}  // namespace driftlab
