#pragma once

#include <vector>

#include "driftlab/drift.hpp"
#include "driftlab/particle_set.hpp"

namespace driftlab {

// Entropic optimal transport plan between uniformly-weighted point clouds,
// squared Euclidean cost, solved by stabilized log-domain Sinkhorn updates.
// The coupling is pi_ij = (1/n)(1/m) exp((f_i + g_j - C_ij)/eps).
struct SinkhornPlan {
  ParticleSet source;  // X, n points, weights 1/n
  ParticleSet target;  // Y, m points, weights 1/m
  double eps = 0.0;
  std::vector<double> f;  // n
  std::vector<double> g;  // m
  int iterations_used = 0;
  double residual = 0.0;  // l1 marginal residual at exit
  bool converged = true;
};

SinkhornPlan sinkhorn_plan(const ParticleSet& X, const ParticleSet& Y, double eps,
                           int max_iter = 2000, double tol = 1e-9);

// Dual objective value <f,1/n> + <g,1/m>; equals the primal
// sum pi C + eps KL(pi | mu x nu) at convergence.
double entropic_ot_cost(const SinkhornPlan& plan);

// Primal evaluation from the implied coupling; used by the primal-dual gap check.
double entropic_ot_cost_primal(const SinkhornPlan& plan);

// Dense coupling matrix (n x m, row-major); diagnostics and small-instance tests.
std::vector<double> plan_coupling(const SinkhornPlan& plan);

// Debiased divergence S_eps(X,Y) = OT(X,Y) - OT(X,X)/2 - OT(Y,Y)/2;
// symmetric, positive definite, zero iff X == Y in distribution.
struct SinkhornDivergenceResult {
  double value = 0.0;
  bool converged = true;
};
SinkhornDivergenceResult sinkhorn_divergence(const ParticleSet& X, const ParticleSet& Y,
                                             double eps, int max_iter = 2000,
                                             double tol = 1e-9);

// T(x_i) = sum_j pi_ij y_j / sum_j pi_ij; rows of the coupling applied to the
// target points. Independent of f (row-normalization cancels it).
ParticleSet barycentric_projection(const SinkhornPlan& plan);

// V_SK(x_i) = T_{q->p}(x_i) - T_{q->q}(x_i): attraction toward the data via
// the cross-coupling minus self-coupling repulsion.
struct SinkhornDrift {
  DriftField field;
  bool qp_converged = true;
  bool qq_converged = true;
};
SinkhornDrift sinkhorn_drift(const ParticleSet& X_gen, const ParticleSet& Y_data,
                             double eps, int max_iter = 2000, double tol = 1e-9);

}  // namespace driftlab
