#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "driftlab/particle_set.hpp"

namespace driftlab {

// Isotropic Gaussian mixture with a shared component std. Smoothing a GMM by
// a Gaussian of width sigma just inflates the component variance to
// s^2 = component_std^2 + sigma^2, which gives closed-form smoothed scores.
struct GaussianMixture {
  std::vector<double> weights;  // simplex
  std::vector<double> means;    // k x dim, row-major
  int dim = 0;
  double component_std = 1.0;

  std::size_t components() const { return weights.size(); }
  std::span<const double> mean(std::size_t k) const {
    return {means.data() + k * dim, static_cast<std::size_t>(dim)};
  }
  void validate() const;

  // Default 2D benchmark target: modes at (+-1,+-1), equal weights,
  // component std 0.15.
  static GaussianMixture four_modes();
};

struct IsotropicGaussian {
  std::vector<double> mean;
  double std_dev = 1.0;

  int dim() const { return static_cast<int>(mean.size()); }
  void validate() const;
};

ParticleSet sample_gmm(const GaussianMixture& m, std::size_t n, std::uint64_t seed);
ParticleSet sample_gaussian(const IsotropicGaussian& g, std::size_t n, std::uint64_t seed);

// n points uniform on the 8 "black" unit cells of the 4x4 board over [-2,2]^2
// (cells with floor(u)+floor(v) even).
ParticleSet sample_checkerboard(std::size_t n, std::uint64_t seed);
bool checkerboard_contains(double u, double v);

// 2D spiral t*(cos t, sin t)/C, t ~ U[1.5pi, 4.5pi], scaled so the curve fits
// [-2,2]^2, plus Gaussian jitter (default 0.05) in the scaled coordinates.
ParticleSet sample_swiss_roll(std::size_t n, std::uint64_t seed, double jitter = 0.05);
constexpr double swiss_roll_t_min = 1.5 * 3.14159265358979323846;
constexpr double swiss_roll_t_max = 4.5 * 3.14159265358979323846;
constexpr double swiss_roll_scale = 2.0 / swiss_roll_t_max;

// grad log (m * phi_sigma)(x); log-domain softmax over components.
std::vector<double> gmm_smoothed_score(const GaussianMixture& m, double sigma,
                                       std::span<const double> x);

// log of the smoothed mixture density (normalized); finite-difference oracle
// target for the score.
double gmm_smoothed_log_density(const GaussianMixture& m, double sigma,
                                std::span<const double> x);

// Exactly -(x - mu)/(std^2 + sigma^2). sigma = 0 gives the plain score.
std::vector<double> gaussian_smoothed_score(const IsotropicGaussian& g, double sigma,
                                            std::span<const double> x);

}  // namespace driftlab
