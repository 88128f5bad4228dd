#include "driftlab/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace driftlab {

void KernelSpec::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("KernelSpec: bandwidth must be positive");
  if (dim <= 0) throw std::invalid_argument("KernelSpec: dim must be positive");
}

namespace {
double sq_dist(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}
}  // namespace

double kernel_log_eval(const KernelSpec& spec, std::span<const double> x,
                       std::span<const double> y) {
  if (static_cast<int>(x.size()) != spec.dim)
    throw std::invalid_argument("kernel_eval: point dimension does not match spec.dim");
  const double d2 = sq_dist(x, y);
  switch (spec.family) {
    case KernelFamily::Gaussian:
      return -d2 / (2.0 * spec.bandwidth * spec.bandwidth);
    case KernelFamily::Laplacian:
      return -std::sqrt(d2) / spec.bandwidth;
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  return std::exp(kernel_log_eval(spec, x, y));
}

double kernel_fourier(const KernelSpec& spec, double xi_mag) {
  if (xi_mag < 0.0) throw std::invalid_argument("kernel_fourier: xi_mag must be >= 0");
  const double b2x2 = spec.bandwidth * spec.bandwidth * xi_mag * xi_mag;
  switch (spec.family) {
    case KernelFamily::Gaussian:
      return std::exp(-0.5 * b2x2);
    case KernelFamily::Laplacian:
      return std::pow(1.0 + b2x2, -0.5 * (spec.dim + 1));
  }
  return 1.0;
}

void BandwidthSchedule::validate() const {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("BandwidthSchedule: sigma0 must be positive");
  if (!(sigma_min > 0.0))
    throw std::invalid_argument("BandwidthSchedule: sigma_min must be positive");
  if (sigma_min > sigma0)
    throw std::invalid_argument("BandwidthSchedule: sigma_min must be <= sigma0");
  if (kind == ScheduleKind::Exponential && !(rate > 0.0))
    throw std::invalid_argument("BandwidthSchedule: rate must be positive");
  if ((kind == ScheduleKind::Linear || kind == ScheduleKind::Cosine) && !(horizon > 0.0))
    throw std::invalid_argument("BandwidthSchedule: horizon must be positive");
}

double schedule_freeze_time(const BandwidthSchedule& s) {
  switch (s.kind) {
    case ScheduleKind::Constant:
      return 0.0;
    case ScheduleKind::Exponential:
      return std::log(s.sigma0 / s.sigma_min) / s.rate;
    case ScheduleKind::Linear:
      return s.horizon * (1.0 - s.sigma_min / s.sigma0);
    case ScheduleKind::Cosine:
      return (2.0 * s.horizon / M_PI) * std::acos(s.sigma_min / s.sigma0);
  }
  return 0.0;
}

double schedule_sigma(const BandwidthSchedule& s, double t) {
  if (t < 0.0) throw std::invalid_argument("schedule_sigma: t must be >= 0");
  if (s.kind == ScheduleKind::Constant) return s.sigma0;
  // Freeze-time comparison rather than pointwise max: the cosine formula
  // turns back up for t > 2*horizon, a plain max would not stay monotone.
  if (t >= schedule_freeze_time(s)) return s.sigma_min;
  double v = s.sigma0;
  switch (s.kind) {
    case ScheduleKind::Exponential:
      v = s.sigma0 * std::exp(-s.rate * t);
      break;
    case ScheduleKind::Linear:
      v = s.sigma0 * (1.0 - t / s.horizon);
      break;
    case ScheduleKind::Cosine:
      v = s.sigma0 * std::cos(M_PI * t / (2.0 * s.horizon));
      break;
    default:
      break;
  }
  return std::max(v, s.sigma_min);
}

}  // namespace driftlab
