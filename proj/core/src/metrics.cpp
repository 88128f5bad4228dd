#include "driftlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driftlab/drift.hpp"
#include "driftlab/parallel.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

double sliced_wasserstein(const ParticleSet& X, const ParticleSet& Y, int n_proj,
                          std::uint64_t seed) {
  X.validate();
  Y.validate();
  if (X.dim != Y.dim) throw std::invalid_argument("sliced_wasserstein: dimension mismatch");
  if (X.n() != Y.n())
    throw std::invalid_argument(
        "sliced_wasserstein: equal sample counts required (subsample externally)");
  if (n_proj < 1) throw std::invalid_argument("sliced_wasserstein: n_proj must be >= 1");

  const std::size_t n = X.n();
  const int d = X.dim;
  // directions drawn up front so the projection loop can run data-parallel
  std::vector<double> dirs(static_cast<std::size_t>(n_proj) * d);
  Rng rng(seed);
  for (int p = 0; p < n_proj; ++p) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int j = 0; j < d; ++j) {
        const double v = rng.normal();
        dirs[p * d + j] = v;
        norm2 += v * v;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int j = 0; j < d; ++j) dirs[p * d + j] *= inv;
  }

  const std::size_t grain = 8;
  std::vector<double> partial(chunk_count(static_cast<std::size_t>(n_proj), grain), 0.0);
  parallel_chunks(static_cast<std::size_t>(n_proj), grain,
                  [&](std::size_t ci, std::size_t b, std::size_t e) {
                    std::vector<double> px(n), py(n);
                    double acc = 0.0;
                    for (std::size_t p = b; p < e; ++p) {
                      const double* u = &dirs[p * d];
                      for (std::size_t i = 0; i < n; ++i) {
                        double sx = 0.0, sy = 0.0;
                        for (int j = 0; j < d; ++j) {
                          sx += u[j] * X.data[i * d + j];
                          sy += u[j] * Y.data[i * d + j];
                        }
                        px[i] = sx;
                        py[i] = sy;
                      }
                      std::sort(px.begin(), px.end());
                      std::sort(py.begin(), py.end());
                      double w2 = 0.0;
                      for (std::size_t i = 0; i < n; ++i) {
                        const double diff = px[i] - py[i];
                        w2 += diff * diff;
                      }
                      acc += w2 / static_cast<double>(n);
                    }
                    partial[ci] = acc;
                  });
  double total = 0.0;
  for (double v : partial) total += v;
  return std::sqrt(total / n_proj);
}

double mean_drift_norm(const ParticleSet& X_gen, const ParticleSet& p_samples,
                       const KernelSpec& spec) {
  const DriftField f = mean_shift_drift_field(X_gen, p_samples, X_gen, spec);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.vectors.n(); ++i) {
    double n2 = 0.0;
    for (int j = 0; j < spec.dim; ++j) {
      const double v = f.vectors.data[i * spec.dim + j];
      n2 += v * v;
    }
    acc += std::sqrt(n2);
  }
  return acc / static_cast<double>(X_gen.n());
}

double loglog_correlation(const std::vector<double>& a, const std::vector<double>& b,
                          std::size_t* n_dropped) {
  if (a.size() != b.size()) throw std::invalid_argument("loglog_correlation: size mismatch");
  std::vector<double> la, lb;
  la.reserve(a.size());
  lb.reserve(b.size());
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 1e-300 || b[i] <= 1e-300) {
      ++dropped;
      continue;
    }
    la.push_back(std::log(a[i]));
    lb.push_back(std::log(b[i]));
  }
  if (n_dropped) *n_dropped = dropped;
  const std::size_t n = la.size();
  if (n < 3)
    throw std::invalid_argument("loglog_correlation: fewer than 3 valid pairs");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += la[i];
    mb += lb[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (la[i] - ma) * (lb[i] - mb);
    saa += (la[i] - ma) * (la[i] - ma);
    sbb += (lb[i] - mb) * (lb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0)
    throw std::invalid_argument("loglog_correlation: degenerate series");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace driftlab
