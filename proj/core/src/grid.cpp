#include "driftlab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace driftlab {

DensityGrid DensityGrid::line(int n, double xmin, double xmax) {
  if (n < 2) throw std::invalid_argument("DensityGrid::line: need n >= 2");
  DensityGrid g;
  g.dim = 1;
  g.nx = n;
  g.ny = 1;
  g.x0 = xmin;
  g.hx = (xmax - xmin) / (n - 1);
  g.hy = 0.0;
  g.values.assign(n, 0.0);
  return g;
}

DensityGrid DensityGrid::plane(int nx, int ny, double xmin, double xmax, double ymin,
                               double ymax) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("DensityGrid::plane: need nx,ny >= 2");
  DensityGrid g;
  g.dim = 2;
  g.nx = nx;
  g.ny = ny;
  g.x0 = xmin;
  g.y0 = ymin;
  g.hx = (xmax - xmin) / (nx - 1);
  g.hy = (ymax - ymin) / (ny - 1);
  g.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  return g;
}

void DensityGrid::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("DensityGrid: dim must be 1 or 2");
  if (!(hx > 0.0) || (dim == 2 && !(hy > 0.0)))
    throw std::invalid_argument("DensityGrid: spacing must be positive");
  if (values.size() != static_cast<std::size_t>(nx) * ny)
    throw std::invalid_argument("DensityGrid: value count mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("DensityGrid: non-finite value");
}

bool DensityGrid::aligned_with(const DensityGrid& o) const {
  return dim == o.dim && nx == o.nx && ny == o.ny && x0 == o.x0 && y0 == o.y0 &&
         hx == o.hx && hy == o.hy;
}

namespace {
double trapz_weight_1d(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }
}  // namespace

double DensityGrid::integral() const {
  double s = 0.0;
  if (dim == 1) {
    for (int i = 0; i < nx; ++i) s += trapz_weight_1d(i, nx) * values[i];
    return s * hx;
  }
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      s += trapz_weight_1d(ix, nx) * trapz_weight_1d(iy, ny) * at(ix, iy);
  return s * hx * hy;
}

void DensityGrid::normalize() {
  const double z = integral();
  if (!(z > 0.0)) throw std::invalid_argument("DensityGrid::normalize: nonpositive mass");
  for (double& v : values) v /= z;
}

namespace {

std::vector<double> gaussian_taps(double sigma, double h) {
  const int radius = std::max(1, static_cast<int>(std::ceil(6.0 * sigma / h)));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double z = t * h;
    taps[t + radius] = std::exp(-z * z / (2.0 * sigma * sigma));
    sum += taps[t + radius];
  }
  for (double& v : taps) v /= sum;  // unit discrete mass
  return taps;
}

enum class Pad { Zero, LinearExtrapolate };

double sample_padded(const std::vector<double>& row, int n, int i, Pad pad) {
  if (i >= 0 && i < n) return row[i];
  if (pad == Pad::Zero) return 0.0;
  if (i < 0) return row[0] + (row[1] - row[0]) * i;
  return row[n - 1] + (row[n - 1] - row[n - 2]) * (i - (n - 1));
}

void convolve_axis(std::vector<double>& buf, int n, const std::vector<double>& taps,
                   Pad pad) {
  const int radius = (static_cast<int>(taps.size()) - 1) / 2;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int t = -radius; t <= radius; ++t)
      s += taps[t + radius] * sample_padded(buf, n, i - t, pad);
    out[i] = s;
  }
  buf = std::move(out);
}

DensityGrid smooth_impl(const DensityGrid& g, double sigma, Pad pad) {
  g.validate();
  if (!(sigma > 0.0)) throw std::invalid_argument("smooth: sigma must be positive");
  DensityGrid out = g;
  // separable: rows then columns
  const auto taps_x = gaussian_taps(sigma, g.hx);
  std::vector<double> row(g.nx);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) row[ix] = g.at(ix, iy);
    convolve_axis(row, g.nx, taps_x, pad);
    for (int ix = 0; ix < g.nx; ++ix) out.at(ix, iy) = row[ix];
  }
  if (g.dim == 2) {
    const auto taps_y = gaussian_taps(sigma, g.hy);
    std::vector<double> col(g.ny);
    for (int ix = 0; ix < g.nx; ++ix) {
      for (int iy = 0; iy < g.ny; ++iy) col[iy] = out.at(ix, iy);
      convolve_axis(col, g.ny, taps_y, pad);
      for (int iy = 0; iy < g.ny; ++iy) out.at(ix, iy) = col[iy];
    }
  }
  return out;
}

constexpr double kDensityFloor = 1e-300;

void check_pair(const DensityGrid& p, const DensityGrid& q) {
  p.validate();
  q.validate();
  if (!p.aligned_with(q)) throw std::invalid_argument("grids are not aligned");
}

}  // namespace

DensityGrid smooth_density(const DensityGrid& g, double sigma) {
  return smooth_impl(g, sigma, Pad::Zero);
}

DensityGrid smooth_function(const DensityGrid& g, double sigma) {
  return smooth_impl(g, sigma, Pad::LinearExtrapolate);
}

double smoothed_kl(const DensityGrid& p_grid, const DensityGrid& q_grid, double sigma) {
  check_pair(p_grid, q_grid);
  if (std::abs(p_grid.integral() - 1.0) > 1e-3 || std::abs(q_grid.integral() - 1.0) > 1e-3)
    throw std::invalid_argument("smoothed_kl: grids must integrate to 1 within 1e-3");
  DensityGrid ps = smooth_density(p_grid, sigma);
  DensityGrid qs = smooth_density(q_grid, sigma);
  ps.normalize();
  qs.normalize();
  double s = 0.0;
  for (int iy = 0; iy < ps.ny; ++iy)
    for (int ix = 0; ix < ps.nx; ++ix) {
      const double pv = std::max(ps.at(ix, iy), kDensityFloor);
      const double qv = std::max(qs.at(ix, iy), kDensityFloor);
      const double w = trapz_weight_1d(ix, ps.nx) *
                       (ps.dim == 2 ? trapz_weight_1d(iy, ps.ny) : 1.0);
      s += w * qv * std::log(qv / pv);
    }
  const double cell = ps.dim == 2 ? ps.hx * ps.hy : ps.hx;
  return sigma * sigma * s * cell;
}

VelocityFieldGrid grid_gradient(const DensityGrid& g) {
  g.validate();
  VelocityFieldGrid out;
  out.components.assign(g.dim, g);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      double dx;
      if (ix == 0)
        dx = (g.at(1, iy) - g.at(0, iy)) / g.hx;
      else if (ix == g.nx - 1)
        dx = (g.at(g.nx - 1, iy) - g.at(g.nx - 2, iy)) / g.hx;
      else
        dx = (g.at(ix + 1, iy) - g.at(ix - 1, iy)) / (2.0 * g.hx);
      out.components[0].at(ix, iy) = dx;
      if (g.dim == 2) {
        double dy;
        if (iy == 0)
          dy = (g.at(ix, 1) - g.at(ix, 0)) / g.hy;
        else if (iy == g.ny - 1)
          dy = (g.at(ix, g.ny - 1) - g.at(ix, g.ny - 2)) / g.hy;
        else
          dy = (g.at(ix, iy + 1) - g.at(ix, iy - 1)) / (2.0 * g.hy);
        out.components[1].at(ix, iy) = dy;
      }
    }
  return out;
}

VelocityFieldGrid smoothed_velocity_grid(const DensityGrid& p_grid,
                                         const DensityGrid& q_grid, double sigma) {
  check_pair(p_grid, q_grid);
  DensityGrid ps = smooth_density(p_grid, sigma);
  DensityGrid qs = smooth_density(q_grid, sigma);
  ps.normalize();
  qs.normalize();
  DensityGrid logratio = ps;
  for (std::size_t i = 0; i < logratio.values.size(); ++i) {
    const double pv = std::max(ps.values[i], kDensityFloor);
    const double qv = std::max(qs.values[i], kDensityFloor);
    logratio.values[i] = std::log(qv / pv);
  }
  const DensityGrid smoothed = smooth_function(logratio, sigma);
  VelocityFieldGrid v = grid_gradient(smoothed);
  for (auto& comp : v.components)
    for (double& val : comp.values) val *= -sigma * sigma;
  return v;
}

}  // namespace driftlab
