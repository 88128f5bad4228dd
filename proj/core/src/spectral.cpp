#include "driftlab/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace driftlab {

void DecayRateSpec::validate() const {
  if (!(parameter > 0.0))
    throw std::invalid_argument("DecayRateSpec: parameter must be positive");
}

double decay_rate(const DecayRateSpec& spec, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("decay_rate: k must be positive");
  spec.validate();
  const double p2k2 = spec.parameter * spec.parameter * k * k;
  switch (spec.family) {
    case RateFamily::GaussianRate:
      return p2k2 * std::exp(-0.5 * p2k2);
    case RateFamily::LaplacianRate:
      return 2.0 * spec.parameter * spec.parameter * spec.parameter * k * k / (1.0 + p2k2);
  }
  return 0.0;
}

double gaussian_cutoff(double sigma) { return std::sqrt(2.0) / sigma; }

double analytic_convergence_time(const DecayRateSpec& spec, double k, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("analytic_convergence_time: eps must be in (0,1)");
  return std::log(1.0 / eps) / decay_rate(spec, k);
}

ModeDecaySim simulate_mode_decay(const DecayRateSpec& spec, const std::vector<double>& modes,
                                 double amplitude, double dt, double eps, double t_max) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("simulate_mode_decay: amplitude > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("simulate_mode_decay: eps in (0,1)");
  ModeDecaySim sim;
  sim.modes = modes;
  sim.times.assign(modes.size(), kUnconverged);
  sim.converged.assign(modes.size(), false);
  const double threshold = eps * amplitude;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const double lambda = decay_rate(spec, modes[i]);
    const double step = dt > 0.0 ? dt : 0.1 / lambda;
    double amp = amplitude;
    const double factor = std::exp(-lambda * step);
    double t = 0.0;
    while (t < t_max) {
      amp *= factor;
      t += step;
      if (amp < threshold) {
        sim.times[i] = t;
        sim.converged[i] = true;
        break;
      }
    }
  }
  return sim;
}

namespace {
double gaussian_rate(double k, double sigma) {
  const double s2k2 = sigma * sigma * k * k;
  return s2k2 * std::exp(-0.5 * s2k2);
}
}  // namespace

ModeDecaySim simulate_mode_decay(const BandwidthSchedule& schedule,
                                 const std::vector<double>& modes, double amplitude,
                                 double dt, double eps, double t_max, double e_sample_dt) {
  schedule.validate();
  if (!(amplitude > 0.0)) throw std::invalid_argument("simulate_mode_decay: amplitude > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("simulate_mode_decay: eps in (0,1)");
  ModeDecaySim sim;
  sim.modes = modes;
  sim.times.assign(modes.size(), kUnconverged);
  sim.converged.assign(modes.size(), false);
  std::vector<double> amp(modes.size(), amplitude);
  const double threshold = eps * amplitude;
  // fastest possible Gaussian rate is 2/e at sigma^2 k^2 = 2
  const double auto_dt = std::min(0.01, 0.1 / (2.0 / M_E));
  double t = 0.0;
  double next_sample = 0.0;
  std::size_t remaining = modes.size();
  while (t < t_max) {
    if (e_sample_dt > 0.0 && t >= next_sample) {
      double e = 0.0;
      for (double a : amp) e += a;
      sim.e_times.push_back(t);
      sim.e_values.push_back(e);
      next_sample += e_sample_dt;
    }
    const double sigma = schedule_sigma(schedule, t);
    const double step = dt > 0.0 ? dt : auto_dt;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (sim.converged[i] && e_sample_dt <= 0.0) continue;
      amp[i] *= std::exp(-gaussian_rate(modes[i], sigma) * step);
      if (!sim.converged[i] && amp[i] < threshold) {
        sim.times[i] = t + step;
        sim.converged[i] = true;
        --remaining;
      }
    }
    t += step;
    if (remaining == 0 && e_sample_dt <= 0.0) break;
  }
  return sim;
}

namespace {
// adaptive Simpson on [a,b]
double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double rel_tol) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, a, b);
  const double tol = std::max(std::abs(whole), 1.0) * rel_tol;
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}
}  // namespace

double cumulative_decay(const BandwidthSchedule& schedule, double k, double t,
                        double rel_tol) {
  schedule.validate();
  if (t <= 0.0) return 0.0;
  const double t_freeze = schedule_freeze_time(schedule);
  auto rate_at = [&](double s) { return gaussian_rate(k, schedule_sigma(schedule, s)); };
  const double t_ann = std::min(t, t_freeze);
  double acc = integrate(rate_at, 0.0, t_ann, rel_tol);
  if (t > t_freeze) acc += gaussian_rate(k, schedule.sigma_min) * (t - t_freeze);
  return acc;
}

double annealed_convergence_time(const BandwidthSchedule& schedule, double k, double eps) {
  schedule.validate();
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("annealed_convergence_time: eps must be in (0,1)");
  const double target = std::log(1.0 / eps);
  const double t_freeze = schedule_freeze_time(schedule);
  const double at_freeze = cumulative_decay(schedule, k, t_freeze);
  if (at_freeze < target) {
    // frozen tail decays at the constant floor rate, so the crossing is exact
    const double sigma_inf =
        schedule.kind == ScheduleKind::Constant ? schedule.sigma0 : schedule.sigma_min;
    return t_freeze + (target - at_freeze) / gaussian_rate(k, sigma_inf);
  }
  double lo = 0.0, hi = t_freeze;
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cumulative_decay(schedule, k, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double annealing_bound(double sigma0, double sigma_min, double rate, double k_max,
                       double eps) {
  if (!(sigma0 > 0.0 && sigma_min > 0.0 && rate > 0.0 && k_max > 0.0))
    throw std::invalid_argument("annealing_bound: all parameters must be positive");
  if (sigma_min > sigma0) throw std::invalid_argument("annealing_bound: sigma_min <= sigma0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("annealing_bound: eps in (0,1)");
  const double lambda_min = gaussian_rate(k_max, sigma_min);
  return std::log(sigma0 / sigma_min) / rate + std::log(1.0 / eps) / lambda_min;
}

std::vector<ScheduleAblationEntry> schedule_ablation(
    const std::vector<std::pair<std::string, BandwidthSchedule>>& schedules,
    const std::vector<double>& modes, double eps, double amplitude, double t_max,
    double e_sample_dt) {
  std::vector<ScheduleAblationEntry> out;
  out.reserve(schedules.size());
  for (const auto& [name, sched] : schedules) {
    ScheduleAblationEntry e;
    e.name = name;
    e.schedule = sched;
    e.sim = simulate_mode_decay(sched, modes, amplitude, 0.0, eps, t_max, e_sample_dt);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace driftlab
