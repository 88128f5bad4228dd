#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftlab/kernels.hpp"
#include "driftlab/particle_set.hpp"

namespace driftlab {

struct MetricReport {
  std::string name;
  double value = 0.0;
  std::size_t n_samples = 0;
  int n_projections = 0;
  std::uint64_t seed = 0;
};

// Sliced 2-Wasserstein: sqrt of the mean over random unit directions of the
// 1D W2^2 between the projected samples (equal counts, sorted matching).
// Directions come from a dedicated stream, so calls sharing a seed share
// projections.
double sliced_wasserstein(const ParticleSet& X, const ParticleSet& Y, int n_proj,
                          std::uint64_t seed);

// Mean l2 norm of the mean-shift drift over the generated points, with the
// generated set doubling as the q-samples (self-repulsion included).
double mean_drift_norm(const ParticleSet& X_gen, const ParticleSet& p_samples,
                       const KernelSpec& spec);

// Pearson correlation of (log a, log b); pairs with either entry <= 1e-300
// are dropped and counted in *n_dropped. Fewer than 3 valid pairs is an error.
double loglog_correlation(const std::vector<double>& a, const std::vector<double>& b,
                          std::size_t* n_dropped = nullptr);

}  // namespace driftlab
