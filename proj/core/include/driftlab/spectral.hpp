#pragma once

#include <limits>
#include <string>
#include <vector>

#include "driftlab/kernels.hpp"

namespace driftlab {

enum class RateFamily { GaussianRate, LaplacianRate };

// Per-mode decay rates of the linearized dynamics:
//   Gaussian:  lambda(k) = sigma^2 k^2 exp(-sigma^2 k^2 / 2)
//   Laplacian: lambda(k) = 2 tau^3 k^2 / (1 + tau^2 k^2)
struct DecayRateSpec {
  RateFamily family = RateFamily::GaussianRate;
  double parameter = 1.0;  // sigma or tau

  void validate() const;
};

double decay_rate(const DecayRateSpec& spec, double k);

// Wavenumber of the fastest-decaying Gaussian mode, sqrt(2)/sigma.
double gaussian_cutoff(double sigma);

// T(k) = log(1/eps) / lambda(k).
double analytic_convergence_time(const DecayRateSpec& spec, double k, double eps);

inline constexpr double kUnconverged = std::numeric_limits<double>::infinity();

struct ModeDecaySim {
  std::vector<double> modes;
  std::vector<double> times;          // first t with |amp| < eps*A; kUnconverged sentinel
  std::vector<bool> converged;
  std::vector<double> e_times;        // E(t) = sum_k |amp_k| samples (joint sims only)
  std::vector<double> e_values;
};

// Fixed-rate simulation, amp *= exp(-lambda dt) until threshold or t_max.
// dt <= 0 picks dt = 0.1/lambda(k) per mode; the multiplicative update is
// exact for a frozen rate, so scaling dt per mode changes only the crossing
// resolution (~1.5% of T), never the amplitude path.
ModeDecaySim simulate_mode_decay(const DecayRateSpec& spec, const std::vector<double>& modes,
                                 double amplitude, double dt, double eps, double t_max);

// Annealed Gaussian simulation with shared time axis; rates follow sigma(t).
// dt <= 0 picks min(0.01, 0.1/lambda_max(sigma(t))). E(t) recorded every
// e_sample_dt if positive.
ModeDecaySim simulate_mode_decay(const BandwidthSchedule& schedule,
                                 const std::vector<double>& modes, double amplitude,
                                 double dt, double eps, double t_max,
                                 double e_sample_dt = 0.0);

// Cumulative decay Lambda(k,t) = int_0^t lambda_G(k, sigma(s)) ds, adaptive
// Simpson quadrature on the annealing phase plus the exact frozen tail.
double cumulative_decay(const BandwidthSchedule& schedule, double k, double t,
                        double rel_tol = 1e-8);

// Root of Lambda(k,T) = log(1/eps); closed-form tail once sigma freezes.
double annealed_convergence_time(const BandwidthSchedule& schedule, double k, double eps);

// Two-term upper bound on the annealed convergence time of all modes up to
// K_max: sweep duration plus the frozen-phase tail at the slowest rate.
double annealing_bound(double sigma0, double sigma_min, double rate, double k_max,
                       double eps);

struct ScheduleAblationEntry {
  std::string name;
  BandwidthSchedule schedule;
  ModeDecaySim sim;
};

std::vector<ScheduleAblationEntry> schedule_ablation(
    const std::vector<std::pair<std::string, BandwidthSchedule>>& schedules,
    const std::vector<double>& modes, double eps, double amplitude, double t_max,
    double e_sample_dt = 1.0);

}  // namespace driftlab
