#pragma once

#include <span>

namespace driftlab {

enum class KernelFamily { Gaussian, Laplacian };

// Positive, even kernel with a radial Fourier profile. Unnormalized on
// purpose: the mean-shift drift is a ratio, so normalizing constants cancel
// and dropping them avoids needless underflow at small bandwidths.
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double bandwidth = 1.0;  // sigma for Gaussian, tau for Laplacian
  int dim = 1;

  void validate() const;  // throws std::invalid_argument
};

// Gaussian: exp(-|x-y|^2/(2 sigma^2)); Laplacian: exp(-|x-y|/tau).
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

// log k(x,y); the softmax path works here to survive bandwidths ~0.05.
double kernel_log_eval(const KernelSpec& spec, std::span<const double> x,
                       std::span<const double> y);

// Radial Fourier profile in (0,1], value 1 at xi=0.
// Gaussian: exp(-sigma^2 xi^2 / 2); Laplacian: (1 + tau^2 xi^2)^(-(d+1)/2).
double kernel_fourier(const KernelSpec& spec, double xi_mag);

enum class ScheduleKind { Constant, Exponential, Linear, Cosine };

// sigma(t) policy, non-increasing, held at sigma_min once reached.
//   Exponential: sigma0 * exp(-rate * t)
//   Linear:      sigma0 * (1 - t/horizon)
//   Cosine:      sigma0 * cos(pi t / (2 horizon))
struct BandwidthSchedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double sigma0 = 1.0;
  double sigma_min = 1.0;
  double rate = 0.0;     // Exponential only
  double horizon = 0.0;  // Linear/Cosine only

  void validate() const;
};

double schedule_sigma(const BandwidthSchedule& s, double t);

// First t at which sigma(t) == sigma_min (0 for Constant, +inf if never).
double schedule_freeze_time(const BandwidthSchedule& s);

}  // namespace driftlab
