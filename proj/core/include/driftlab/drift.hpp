#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftlab/kernels.hpp"
#include "driftlab/particle_set.hpp"
#include "driftlab/targets.hpp"

namespace driftlab {

struct DriftVector {
  std::vector<double> v;
  bool far_from_support = false;
};

// Kernel mean-shift drift V(x) = V_p^+(x) - V_q^-(x), each term a
// softmax-weighted mean displacement evaluated in the log domain. Falls back
// to nearest-sample attraction (and flags it) when a probe is so far from a
// sample set that every linear-domain weight underflows to zero.
DriftVector mean_shift_drift(std::span<const double> x, const ParticleSet& p_samples,
                             const ParticleSet& q_samples, const KernelSpec& spec);

// Sum of mean_shift_drift over a list of kernel scales.
DriftVector multiscale_drift(std::span<const double> x, const ParticleSet& p_samples,
                             const ParticleSet& q_samples,
                             std::span<const KernelSpec> specs);

// Closed form for the Gaussian kernel: sigma^2 (grad log p_sigma - grad log q_sigma).
std::vector<double> analytic_gaussian_drift(std::span<const double> x,
                                            const GaussianMixture& p,
                                            const IsotropicGaussian& q, double sigma);

// Drift vectors evaluated on a probe set; CSV rows are
// probe coords..., vector components..., far_flag.
struct DriftField {
  ParticleSet probes;
  ParticleSet vectors;
  std::vector<std::uint8_t> far_flags;

  bool any_far() const;
  void write_csv(const std::string& path) const;
};

DriftField mean_shift_drift_field(const ParticleSet& probes, const ParticleSet& p_samples,
                                  const ParticleSet& q_samples, const KernelSpec& spec);

// Empirical-vs-analytic check of the Gaussian score-difference identity.
struct ScoreIdentityReport {
  double mean_error = 0.0;
  double max_error = 0.0;
  std::vector<double> errors;  // per probe, ||V_hat - V||_2
  DriftField empirical;
  DriftField analytic;
  std::size_t n_samples = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

ScoreIdentityReport verify_score_identity(const GaussianMixture& p, const IsotropicGaussian& q,
                                          double sigma, std::size_t n_samples,
                                          const ParticleSet& probe_grid, std::uint64_t seed);

// Uniform nx x ny probe grid over [x0,x1] x [y0,y1].
ParticleSet probe_grid_2d(int nx, int ny, double x0, double x1, double y0, double y1);

}  // namespace driftlab
