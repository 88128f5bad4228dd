#pragma once

#include <vector>

namespace driftlab {

// Uniform 1D/2D grid carrying a sampled density or scalar field. Diagnostic
// use only (the training path is particle-based).
struct DensityGrid {
  int dim = 1;
  int nx = 0, ny = 1;
  double x0 = 0.0, y0 = 0.0;
  double hx = 0.0, hy = 0.0;
  std::vector<double> values;  // [iy*nx + ix]

  static DensityGrid line(int n, double xmin, double xmax);
  static DensityGrid plane(int nx, int ny, double xmin, double xmax, double ymin,
                           double ymax);

  double x_at(int ix) const { return x0 + ix * hx; }
  double y_at(int iy) const { return y0 + iy * hy; }
  double& at(int ix, int iy = 0) { return values[static_cast<std::size_t>(iy) * nx + ix]; }
  double at(int ix, int iy = 0) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }

  bool aligned_with(const DensityGrid& o) const;
  double integral() const;  // trapezoid
  void normalize();
  void validate() const;
};

// phi_sigma * grid for a density: truncated (6 sigma) separable Gaussian taps,
// zero-padded, taps normalized to unit discrete mass.
DensityGrid smooth_density(const DensityGrid& g, double sigma);

// phi_sigma * grid for a generic function: same taps but linear-extrapolation
// padding, so affine fields convolve exactly.
DensityGrid smooth_function(const DensityGrid& g, double sigma);

// Smoothed KL energy sigma^2 * integral q_sigma log(q_sigma / p_sigma):
// smooths both grids, renormalizes, floors at 1e-300, trapezoid quadrature.
double smoothed_kl(const DensityGrid& p_grid, const DensityGrid& q_grid, double sigma);

// Wasserstein gradient field of the smoothed KL energy on the grid:
// v_sigma = -sigma^2 grad(phi_sigma * log(q_sigma/p_sigma)), central
// differences (one-sided at the boundary). components[a] holds axis a.
struct VelocityFieldGrid {
  std::vector<DensityGrid> components;
};
VelocityFieldGrid smoothed_velocity_grid(const DensityGrid& p_grid,
                                         const DensityGrid& q_grid, double sigma);

// grad via central differences of an arbitrary grid field.
VelocityFieldGrid grid_gradient(const DensityGrid& g);

}  // namespace driftlab
