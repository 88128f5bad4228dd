#include "driftlab/detail/pairwise.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "driftlab/parallel.hpp"

namespace driftlab::detail {

namespace {

struct Scratch {
  std::vector<double> logw;
  std::vector<double> w;
  std::vector<double> c;
};

Scratch& scratch() {
  static thread_local Scratch s;
  return s;
}

// Fills logw[i] = log k(x, pts_i) and c[i] with grad_{y} log k(x,y)|_{y=pts_i}
// = c[i] (x - pts_i). Returns max log-weight.
double log_weights(const double* x, const double* pts, std::size_t n, int dim,
                   KernelFamily family, double bandwidth, double* logw, double* c) {
  if (family == KernelFamily::Gaussian) {
    const double inv2s2 = 1.0 / (2.0 * bandwidth * bandwidth);
    if (dim == 2) {
      const double x0 = x[0], x1 = x[1];
      for (std::size_t i = 0; i < n; ++i) {
        const double d0 = x0 - pts[2 * i], d1 = x1 - pts[2 * i + 1];
        logw[i] = -(d0 * d0 + d1 * d1) * inv2s2;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (int j = 0; j < dim; ++j) {
          const double d = x[j] - pts[i * dim + j];
          d2 += d * d;
        }
        logw[i] = -d2 * inv2s2;
      }
    }
    if (c) {
      const double invs2 = 1.0 / (bandwidth * bandwidth);
      for (std::size_t i = 0; i < n; ++i) c[i] = invs2;
    }
  } else {
    const double invtau = 1.0 / bandwidth;
    if (dim == 2) {
      const double x0 = x[0], x1 = x[1];
      for (std::size_t i = 0; i < n; ++i) {
        const double d0 = x0 - pts[2 * i], d1 = x1 - pts[2 * i + 1];
        logw[i] = -std::sqrt(d0 * d0 + d1 * d1) * invtau;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (int j = 0; j < dim; ++j) {
          const double d = x[j] - pts[i * dim + j];
          d2 += d * d;
        }
        logw[i] = -std::sqrt(d2) * invtau;
      }
    }
    if (c) {
      // grad_y log k = (x-y)/(tau |x-y|); c = 1/(tau |x-y|), 0 at |x-y|=0
      // (subgradient choice, keeps the product c*(x-y) finite).
      for (std::size_t i = 0; i < n; ++i) {
        const double dist = -logw[i] * bandwidth;
        c[i] = dist > 0.0 ? 1.0 / (bandwidth * dist) : 0.0;
      }
    }
  }
  double mx = logw[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, logw[i]);
  return mx;
}

std::size_t nearest_index(const double* x, const double* pts, std::size_t n, int dim) {
  std::size_t best = 0;
  double bd = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double d = x[j] - pts[j];
    bd += d * d;
  }
  for (std::size_t i = 1; i < n; ++i) {
    double d2 = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double d = x[j] - pts[i * dim + j];
      d2 += d * d;
    }
    if (d2 < bd) {
      bd = d2;
      best = i;
    }
  }
  return best;
}

}  // namespace

bool mean_shift_term(const double* x, const double* pts, std::size_t n, int dim,
                     KernelFamily family, double bandwidth, double* out,
                     double* weights_out, double* cfac_out) {
  Scratch& s = scratch();
  s.logw.resize(n);
  double* logw = s.logw.data();
  const double mx = log_weights(x, pts, n, dim, family, bandwidth, logw, cfac_out);

  if (mx < kFarFromSupportLogFloor) {
    const std::size_t ni = nearest_index(x, pts, n, dim);
    for (int j = 0; j < dim; ++j) out[j] = pts[ni * dim + j] - x[j];
    if (weights_out) {
      std::memset(weights_out, 0, n * sizeof(double));
      weights_out[ni] = 1.0;
    }
    return true;
  }

  double* w = weights_out;
  if (!w) {
    s.w.resize(n);
    w = s.w.data();
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(logw[i] - mx);
    sum += w[i];
  }
  const double inv = 1.0 / sum;
  if (dim == 2) {
    // accumulate displacements, not absolute coordinates: keeps the drift
    // exactly translation-equivariant in floating point
    const double x0 = x[0], x1 = x[1];
    double a0 = 0.0, a1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a0 += w[i] * (pts[2 * i] - x0);
      a1 += w[i] * (pts[2 * i + 1] - x1);
    }
    out[0] = a0 * inv;
    out[1] = a1 * inv;
  } else {
    for (int j = 0; j < dim; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j < dim; ++j) out[j] += w[i] * (pts[i * dim + j] - x[j]);
    for (int j = 0; j < dim; ++j) out[j] *= inv;
  }
  if (weights_out)
    for (std::size_t i = 0; i < n; ++i) weights_out[i] *= inv;
  return false;
}

void mean_shift_field(const double* probes, std::size_t m, const double* p,
                      std::size_t np, const double* q, std::size_t nq, int dim,
                      KernelFamily family, double bandwidth, double* v_out,
                      std::uint8_t* far_out) {
  parallel_chunks(m, 64, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<double> ta(dim), tb(dim);
    for (std::size_t i = b; i < e; ++i) {
      const double* x = probes + i * dim;
      const bool fa = mean_shift_term(x, p, np, dim, family, bandwidth, ta.data());
      const bool fb = mean_shift_term(x, q, nq, dim, family, bandwidth, tb.data());
      for (int j = 0; j < dim; ++j) v_out[i * dim + j] = ta[j] - tb[j];
      if (far_out) far_out[i] = (fa || fb) ? 1 : 0;
    }
  });
}

namespace {
// fills s_j = (dual_j - |x - y_j|^2)/eps, returns max
double sinkhorn_row(const double* x, const double* Y, std::size_t m, int dim,
                    double inv_eps, const double* dual, double* s) {
  if (dim == 2) {
    const double x0 = x[0], x1 = x[1];
    for (std::size_t j = 0; j < m; ++j) {
      const double d0 = x0 - Y[2 * j], d1 = x1 - Y[2 * j + 1];
      s[j] = (dual[j] - (d0 * d0 + d1 * d1)) * inv_eps;
    }
  } else {
    for (std::size_t j = 0; j < m; ++j) {
      double d2 = 0.0;
      for (int t = 0; t < dim; ++t) {
        const double d = x[t] - Y[j * dim + t];
        d2 += d * d;
      }
      s[j] = (dual[j] - d2) * inv_eps;
    }
  }
  double mx = s[0];
  for (std::size_t j = 1; j < m; ++j) mx = std::max(mx, s[j]);
  return mx;
}
}  // namespace

void sinkhorn_half_sweep(const double* X, std::size_t n, const double* Y, std::size_t m,
                         int dim, double eps, const double* dual, double log_w,
                         double* out) {
  const double inv_eps = 1.0 / eps;
  parallel_chunks(n, 32, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<double> s(m);
    for (std::size_t i = b; i < e; ++i) {
      const double mx = sinkhorn_row(X + i * dim, Y, m, dim, inv_eps, dual, s.data());
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) sum += std::exp(s[j] - mx);
      out[i] = -eps * (mx + std::log(sum) + log_w);
    }
  });
}

void barycentric_rows(const double* X, std::size_t n, const double* Y, std::size_t m,
                      int dim, double eps, const double* dual, double* out) {
  const double inv_eps = 1.0 / eps;
  parallel_chunks(n, 32, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<double> s(m);
    for (std::size_t i = b; i < e; ++i) {
      const double mx = sinkhorn_row(X + i * dim, Y, m, dim, inv_eps, dual, s.data());
      double sum = 0.0;
      for (int t = 0; t < dim; ++t) out[i * dim + t] = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double w = std::exp(s[j] - mx);
        sum += w;
        for (int t = 0; t < dim; ++t) out[i * dim + t] += w * Y[j * dim + t];
      }
      for (int t = 0; t < dim; ++t) out[i * dim + t] /= sum;
    }
  });
}

void coupled_loss_and_input_grad(const double* X, std::size_t M, const double* P,
                                 std::size_t np, int dim, KernelFamily family,
                                 double bandwidth, double eta, double* v_out,
                                 double* loss_out, double* dx_out) {
  // Repulsive-side softmax weights b_{im} and scale factors c_{im} are kept
  // so the second pass can route gradients into every generated sample.
  // Buffers persist across calls; every entry is overwritten each pass.
  static thread_local std::vector<double> Bw, Cw, Bterm, U;
  Bw.resize(M * M);
  Cw.resize(M * M);
  Bterm.resize(M * dim);
  U.resize(M * dim);
  const double uscale = 2.0 * eta * eta / static_cast<double>(M);

  const std::size_t grain = 32;
  std::vector<double> chunk_loss(chunk_count(M, grain), 0.0);

  parallel_chunks(M, grain, [&](std::size_t ci, std::size_t cb, std::size_t ce) {
    std::vector<double> a(np), cp(np);
    std::vector<double> ta(dim), tb(dim), u(dim), e(dim);
    std::vector<double> s1(dim), wbarA(dim), s2(dim), wbarB(dim);
    double acc = 0.0;
    for (std::size_t i = cb; i < ce; ++i) {
      const double* x = X + i * dim;
      const bool farA =
          mean_shift_term(x, P, np, dim, family, bandwidth, ta.data(), a.data(), cp.data());
      mean_shift_term(x, X, M, dim, family, bandwidth, tb.data(), &Bw[i * M], &Cw[i * M]);

      double vnorm2 = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double vj = ta[j] - tb[j];
        v_out[i * dim + j] = vj;
        Bterm[i * dim + j] = tb[j];
        u[j] = uscale * vj;
        U[i * dim + j] = u[j];
        vnorm2 += vj * vj;
      }
      acc += vnorm2;

      // probe-path gradient u^T (dA/dx - dB/dx); the -I pieces cancel
      for (int j = 0; j < dim; ++j) s1[j] = wbarA[j] = s2[j] = wbarB[j] = 0.0;
      double sA = 0.0, sB = 0.0;
      if (!farA) {
        if (dim == 2) {
          const double x0 = x[0], x1 = x[1], u0 = u[0], u1 = u[1];
          double s10 = 0.0, s11 = 0.0, wA0 = 0.0, wA1 = 0.0;
          for (std::size_t k = 0; k < np; ++k) {
            const double e0 = P[2 * k] - x0, e1 = P[2 * k + 1] - x1;
            const double ue = u0 * e0 + u1 * e1;
            const double akck = a[k] * cp[k];
            sA += a[k] * ue;
            s10 += akck * ue * e0;
            s11 += akck * ue * e1;
            wA0 += akck * e0;
            wA1 += akck * e1;
          }
          s1[0] = s10;
          s1[1] = s11;
          wbarA[0] = wA0;
          wbarA[1] = wA1;
        } else {
          for (std::size_t k = 0; k < np; ++k) {
            double ue = 0.0;
            for (int j = 0; j < dim; ++j) {
              e[j] = P[k * dim + j] - x[j];
              ue += u[j] * e[j];
            }
            const double ak = a[k], ck = cp[k];
            sA += ak * ue;
            for (int j = 0; j < dim; ++j) {
              s1[j] += ak * ue * ck * e[j];
              wbarA[j] += ak * ck * e[j];
            }
          }
        }
      }
      const double* brow = &Bw[i * M];
      const double* crow = &Cw[i * M];
      if (dim == 2) {
        const double x0 = x[0], x1 = x[1], u0 = u[0], u1 = u[1];
        double s20 = 0.0, s21 = 0.0, wB0 = 0.0, wB1 = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
          const double e0 = X[2 * k] - x0, e1 = X[2 * k + 1] - x1;
          const double ue = u0 * e0 + u1 * e1;
          const double bkck = brow[k] * crow[k];
          sB += brow[k] * ue;
          s20 += bkck * ue * e0;
          s21 += bkck * ue * e1;
          wB0 += bkck * e0;
          wB1 += bkck * e1;
        }
        s2[0] = s20;
        s2[1] = s21;
        wbarB[0] = wB0;
        wbarB[1] = wB1;
      } else {
        for (std::size_t k = 0; k < M; ++k) {
          double ue = 0.0;
          for (int j = 0; j < dim; ++j) {
            e[j] = X[k * dim + j] - x[j];
            ue += u[j] * e[j];
          }
          const double bk = brow[k], ck = crow[k];
          sB += bk * ue;
          for (int j = 0; j < dim; ++j) {
            s2[j] += bk * ue * ck * e[j];
            wbarB[j] += bk * ck * e[j];
          }
        }
      }
      for (int j = 0; j < dim; ++j) {
        const double probeA = farA ? -u[j] : (s1[j] - sA * wbarA[j] - u[j]);
        const double probeB = s2[j] - sB * wbarB[j] - u[j];
        dx_out[i * dim + j] = probeA - probeB;
      }
    }
    chunk_loss[ci] = acc;
  });

  double total = 0.0;
  for (double v : chunk_loss) total += v;
  *loss_out = eta * eta * total / static_cast<double>(M);

  // sample-path: row i pushes -b_m u_i + b_m c_m (u_i . (e_m - B_i)) e_m into
  // every column m; chunk-local accumulators folded in chunk order keep the
  // result independent of the worker count.
  const std::size_t nchunks = chunk_count(M, grain);
  std::vector<std::vector<double>> acc_dx(nchunks);
  parallel_chunks(M, grain, [&](std::size_t ci, std::size_t cb, std::size_t ce) {
    auto& acc = acc_dx[ci];
    acc.assign(M * dim, 0.0);
    for (std::size_t i = cb; i < ce; ++i) {
      const double* x = X + i * dim;
      const double* u = &U[i * dim];
      const double* Bi = &Bterm[i * dim];
      const double* brow = &Bw[i * M];
      const double* crow = &Cw[i * M];
      if (dim == 2) {
        const double u0 = u[0], u1 = u[1], B0 = Bi[0], B1 = Bi[1];
        const double x0 = x[0], x1 = x[1];
        for (std::size_t m = 0; m < M; ++m) {
          const double b = brow[m];
          const double e0 = X[2 * m] - x0, e1 = X[2 * m + 1] - x1;
          const double dot = u0 * (e0 - B0) + u1 * (e1 - B1);
          const double bc = b * crow[m] * dot;
          acc[2 * m] += bc * e0 - b * u0;
          acc[2 * m + 1] += bc * e1 - b * u1;
        }
      } else {
        for (std::size_t m = 0; m < M; ++m) {
          const double b = brow[m];
          double dot = 0.0;
          for (int j = 0; j < dim; ++j)
            dot += u[j] * ((X[m * dim + j] - x[j]) - Bi[j]);
          const double bc = b * crow[m] * dot;
          for (int j = 0; j < dim; ++j)
            acc[m * dim + j] += bc * (X[m * dim + j] - x[j]) - b * u[j];
        }
      }
    }
  });
  for (std::size_t c = 0; c < nchunks; ++c)
    for (std::size_t t = 0; t < M * static_cast<std::size_t>(dim); ++t)
      dx_out[t] += acc_dx[c][t];
}

}  // namespace driftlab::detail
