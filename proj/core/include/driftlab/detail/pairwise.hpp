#pragma once

// Internal raw-array kernels behind the drift operators. Everything here is
// pure over its inputs; buffers are caller-owned. Compiled with -ffast-math
// (vectorized exp), so no NaN propagation is allowed in or out of these
// routines: degenerate cases are handled by explicit branches.

#include <cstddef>
#include <cstdint>

#include "driftlab/kernels.hpp"

namespace driftlab::detail {

// Pre-shift floor: if the largest log-weight of a term falls below this, the
// linear-domain weight sum would be exactly 0 and the softmax ratio 0/0; the
// term switches to nearest-sample attraction and flags far_from_support.
inline constexpr double kFarFromSupportLogFloor = -745.0;

// One mean-shift term sum_i w_i (y_i - x) / sum_i w_i with softmax weights
// w_i = exp(log k(x,y_i) - max). Writes the term into out[0..dim).
// Optional per-sample outputs (size n): weights_out = softmax weights b_i,
// cfac_out = c_i with grad_{y_i} log k(x,y_i) = c_i (x - y_i).
// Returns true if the far-from-support fallback fired.
bool mean_shift_term(const double* x, const double* pts, std::size_t n, int dim,
                     KernelFamily family, double bandwidth, double* out,
                     double* weights_out = nullptr, double* cfac_out = nullptr);

// V = term(p) - term(q) for every probe row; V is m x dim. far[i] set if
// either term fell back. Threaded over probes.
void mean_shift_field(const double* probes, std::size_t m, const double* p,
                      std::size_t np, const double* q, std::size_t nq, int dim,
                      KernelFamily family, double bandwidth, double* v_out,
                      std::uint8_t* far_out);

// One log-domain Sinkhorn half-sweep over the implicit squared-Euclidean
// cost C_ij = |X_i - Y_j|^2:
//   out_i = -eps * ( LSE_j( (dual_j - C_ij)/eps ) + log_w )
// with log_w the log of the uniform weight on Y. Threaded over rows.
void sinkhorn_half_sweep(const double* X, std::size_t n, const double* Y, std::size_t m,
                         int dim, double eps, const double* dual, double log_w,
                         double* out);

// Row softmax of (dual_j - C_ij)/eps applied to Y: the barycentric projection
// T(x_i) = sum_j pi_ij Y_j / sum_j pi_ij. Writes n x dim.
void barycentric_rows(const double* X, std::size_t n, const double* Y, std::size_t m,
                      int dim, double eps, const double* dual, double* out);

// Coupled objective on a generated batch X (probes == q-samples):
//   L = (eta^2 / M) * sum_i ||V(x_i)||^2,
// with gradients flowing through the probe argument and through every
// generated sample inside the repulsive term. Writes V (M x dim), the loss,
// and dL/dX (M x dim). P is the (constant) data batch.
void coupled_loss_and_input_grad(const double* X, std::size_t M, const double* P,
                                 std::size_t np, int dim, KernelFamily family,
                                 double bandwidth, double eta, double* v_out,
                                 double* loss_out, double* dx_out);

}  // namespace driftlab::detail
