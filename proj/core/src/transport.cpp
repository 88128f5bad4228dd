#include "driftlab/transport.hpp"

#include <cmath>
#include <stdexcept>

#include "driftlab/detail/pairwise.hpp"

namespace driftlab {

namespace {
void check_pair(const ParticleSet& X, const ParticleSet& Y, double eps) {
  X.validate();
  Y.validate();
  if (X.dim != Y.dim) throw std::invalid_argument("sinkhorn: dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("sinkhorn: eps must be positive");
}
}  // namespace

SinkhornPlan sinkhorn_plan(const ParticleSet& X, const ParticleSet& Y, double eps,
                           int max_iter, double tol) {
  check_pair(X, Y, eps);
  if (max_iter < 1) throw std::invalid_argument("sinkhorn: max_iter must be >= 1");
  SinkhornPlan plan;
  plan.source = X;
  plan.target = Y;
  plan.eps = eps;
  const std::size_t n = X.n(), m = Y.n();
  plan.f.assign(n, 0.0);
  plan.g.assign(m, 0.0);
  const double log_an = -std::log(static_cast<double>(n));
  const double log_bm = -std::log(static_cast<double>(m));
  std::vector<double> f_new(n);

  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iter; ++it) {
    // column update, then row update; after a row update the row marginals
    // are exact, so the residual is read off the row-update displacement.
    detail::sinkhorn_half_sweep(Y.data.data(), m, X.data.data(), n, X.dim, eps,
                                plan.f.data(), log_an, plan.g.data());
    detail::sinkhorn_half_sweep(X.data.data(), n, Y.data.data(), m, X.dim, eps,
                                plan.g.data(), log_bm, f_new.data());
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      residual += std::abs(std::exp((plan.f[i] - f_new[i]) / eps) - 1.0) / n;
    plan.f.swap(f_new);
    if (residual < tol) {
      ++it;
      break;
    }
  }
  plan.iterations_used = it;
  plan.residual = residual;
  plan.converged = residual <= 10.0 * tol;
  return plan;
}

double entropic_ot_cost(const SinkhornPlan& plan) {
  double fsum = 0.0, gsum = 0.0;
  for (double v : plan.f) fsum += v;
  for (double v : plan.g) gsum += v;
  return fsum / plan.f.size() + gsum / plan.g.size();
}

std::vector<double> plan_coupling(const SinkhornPlan& plan) {
  const std::size_t n = plan.f.size(), m = plan.g.size();
  const int d = plan.source.dim;
  std::vector<double> pi(n * m);
  const double log_ab = -std::log(static_cast<double>(n)) - std::log(static_cast<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double c = 0.0;
      for (int t = 0; t < d; ++t) {
        const double diff = plan.source.data[i * d + t] - plan.target.data[j * d + t];
        c += diff * diff;
      }
      pi[i * m + j] = std::exp((plan.f[i] + plan.g[j] - c) / plan.eps + log_ab);
    }
  }
  return pi;
}

double entropic_ot_cost_primal(const SinkhornPlan& plan) {
  const std::size_t n = plan.f.size(), m = plan.g.size();
  const int d = plan.source.dim;
  const double log_ab = -std::log(static_cast<double>(n)) - std::log(static_cast<double>(m));
  // sum pi C + eps sum pi log(pi/(a x b)) with log(pi/(a x b)) = (f+g-C)/eps
  double cost = 0.0, kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double c = 0.0;
      for (int t = 0; t < d; ++t) {
        const double diff = plan.source.data[i * d + t] - plan.target.data[j * d + t];
        c += diff * diff;
      }
      const double expo = (plan.f[i] + plan.g[j] - c) / plan.eps;
      const double pi = std::exp(expo + log_ab);
      cost += pi * c;
      kl += pi * expo;
    }
  }
  return cost + plan.eps * kl;
}

SinkhornDivergenceResult sinkhorn_divergence(const ParticleSet& X, const ParticleSet& Y,
                                             double eps, int max_iter, double tol) {
  const SinkhornPlan xy = sinkhorn_plan(X, Y, eps, max_iter, tol);
  const SinkhornPlan xx = sinkhorn_plan(X, X, eps, max_iter, tol);
  const SinkhornPlan yy = sinkhorn_plan(Y, Y, eps, max_iter, tol);
  SinkhornDivergenceResult r;
  r.value = entropic_ot_cost(xy) - 0.5 * entropic_ot_cost(xx) - 0.5 * entropic_ot_cost(yy);
  if (std::abs(r.value) < 1e-12) r.value = std::max(r.value, 0.0);
  r.converged = xy.converged && xx.converged && yy.converged;
  return r;
}

ParticleSet barycentric_projection(const SinkhornPlan& plan) {
  const std::size_t n = plan.source.n();
  ParticleSet out(static_cast<int>(n), plan.source.dim);
  detail::barycentric_rows(plan.source.data.data(), n, plan.target.data.data(),
                           plan.target.n(), plan.source.dim, plan.eps, plan.g.data(),
                           out.data.data());
  return out;
}

SinkhornDrift sinkhorn_drift(const ParticleSet& X_gen, const ParticleSet& Y_data,
                             double eps, int max_iter, double tol) {
  const SinkhornPlan qp = sinkhorn_plan(X_gen, Y_data, eps, max_iter, tol);
  const SinkhornPlan qq = sinkhorn_plan(X_gen, X_gen, eps, max_iter, tol);
  const ParticleSet to_p = barycentric_projection(qp);
  const ParticleSet to_q = barycentric_projection(qq);
  SinkhornDrift out;
  out.qp_converged = qp.converged;
  out.qq_converged = qq.converged;
  out.field.probes = X_gen;
  out.field.vectors = ParticleSet(static_cast<int>(X_gen.n()), X_gen.dim);
  out.field.far_flags.assign(X_gen.n(), 0);
  for (std::size_t i = 0; i < X_gen.data.size(); ++i)
    out.field.vectors.data[i] = to_p.data[i] - to_q.data[i];
  return out;
}

}  // namespace driftlab
