#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "driftlab/particle_set.hpp"
#include "driftlab/rng.hpp"
#include "driftlab/targets.hpp"

using namespace driftlab;

namespace {
// central-difference gradient of the analytic smoothed log-density
std::vector<double> fd_score(const GaussianMixture& m, double sigma,
                             std::span<const double> x, double h) {
  std::vector<double> g(m.dim), xp(x.begin(), x.end()), xm(x.begin(), x.end());
  for (int j = 0; j < m.dim; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    g[j] = (gmm_smoothed_log_density(m, sigma, xp) - gmm_smoothed_log_density(m, sigma, xm)) /
           (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return g;
}
}  // namespace

TEST_CASE("sample_gmm degenerate mixture collapses to the mean") {
  GaussianMixture m;
  m.dim = 2;
  m.weights = {1.0};
  m.means = {0.0, 0.0};
  m.component_std = 1e-12;
  const ParticleSet ps = sample_gmm(m, 3, 7);
  for (double v : ps.data) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("sample_gmm empirical mean matches the mixture mean") {
  const GaussianMixture m = GaussianMixture::four_modes();
  const std::size_t n = 50000;
  const ParticleSet ps = sample_gmm(m, n, 11);
  // population mean is 0 per coordinate; per-coordinate std^2 = 1 + sigma_p^2
  const double bound = 3.0 * std::sqrt(1.0 + 0.15 * 0.15) / std::sqrt(double(n));
  double mean0 = 0.0, mean1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean0 += ps.data[2 * i];
    mean1 += ps.data[2 * i + 1];
  }
  CHECK(std::abs(mean0 / n) < bound);
  CHECK(std::abs(mean1 / n) < bound);
}

TEST_CASE("samplers are deterministic under a fixed seed") {
  const GaussianMixture m = GaussianMixture::four_modes();
  CHECK(sample_gmm(m, 500, 3).data == sample_gmm(m, 500, 3).data);
  CHECK(sample_checkerboard(500, 3).data == sample_checkerboard(500, 3).data);
  CHECK(sample_swiss_roll(500, 3).data == sample_swiss_roll(500, 3).data);
  CHECK(sample_gmm(m, 500, 3).data != sample_gmm(m, 500, 4).data);
}

TEST_CASE("checkerboard support and cell balance") {
  const std::size_t n = 10000;
  const ParticleSet ps = sample_checkerboard(n, 5);
  int counts[4][4] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double u = ps.data[2 * i], v = ps.data[2 * i + 1];
    REQUIRE(checkerboard_contains(u, v));
    counts[int(std::floor(u)) + 2][int(std::floor(v)) + 2]++;
  }
  // 8 black cells, multinomial: 5 sigma around n/8
  const double sd = std::sqrt(n * (1.0 / 8) * (7.0 / 8));
  int occupied = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (counts[a][b] == 0) continue;
      ++occupied;
      CHECK(std::abs(counts[a][b] - n / 8.0) < 5.0 * sd);
    }
  CHECK(occupied == 8);
}

TEST_CASE("swiss roll support and zero-jitter curve membership") {
  const ParticleSet ps = sample_swiss_roll(5000, 9);
  for (std::size_t i = 0; i < ps.n(); ++i) {
    CHECK(std::abs(ps.data[2 * i]) < 2.5);
    CHECK(std::abs(ps.data[2 * i + 1]) < 2.5);
  }

  // jitter = 0: nearest-point distance to the parametric curve, coarse grid
  // then golden-section refinement
  const ParticleSet clean = sample_swiss_roll(200, 21, 0.0);
  auto curve = [](double t) {
    return std::pair<double, double>{swiss_roll_scale * t * std::cos(t),
                                     swiss_roll_scale * t * std::sin(t)};
  };
  auto d2_at = [&](double t, double px, double py) {
    const auto [cx, cy] = curve(t);
    return (cx - px) * (cx - px) + (cy - py) * (cy - py);
  };
  for (std::size_t i = 0; i < clean.n(); ++i) {
    const double px = clean.data[2 * i], py = clean.data[2 * i + 1];
    const int grid = 20000;
    double best_t = swiss_roll_t_min, best = 1e300;
    for (int g = 0; g <= grid; ++g) {
      const double t = swiss_roll_t_min + (swiss_roll_t_max - swiss_roll_t_min) * g / grid;
      const double d2 = d2_at(t, px, py);
      if (d2 < best) {
        best = d2;
        best_t = t;
      }
    }
    const double span = (swiss_roll_t_max - swiss_roll_t_min) / grid;
    double lo = best_t - span, hi = best_t + span;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    for (int it = 0; it < 120; ++it) {
      if (d2_at(c, px, py) < d2_at(d, px, py))
        hi = d;
      else
        lo = c;
      c = hi - gr * (hi - lo);
      d = lo + gr * (hi - lo);
    }
    CHECK(std::sqrt(d2_at(0.5 * (lo + hi), px, py)) < 1e-9);
  }
}

TEST_CASE("gmm_smoothed_score closed-form reductions") {
  GaussianMixture single;
  single.dim = 2;
  single.weights = {1.0};
  single.means = {0.4, -0.2};
  single.component_std = 0.15;
  const double sigma = 0.3;
  const std::vector<double> x{1.0, 2.0};
  const auto s = gmm_smoothed_score(single, sigma, x);
  const double s2 = 0.15 * 0.15 + sigma * sigma;
  CHECK(s[0] == doctest::Approx(-(x[0] - 0.4) / s2).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(-(x[1] + 0.2) / s2).epsilon(1e-14));

  GaussianMixture sym;
  sym.dim = 1;
  sym.weights = {0.5, 0.5};
  sym.means = {-0.8, 0.8};
  sym.component_std = 0.2;
  const std::vector<double> origin{0.0};
  CHECK(gmm_smoothed_score(sym, 0.3, origin)[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gmm_smoothed_score matches finite differences of the log-density") {
  const GaussianMixture m = GaussianMixture::four_modes();
  Rng rng(123);
  for (int rep = 0; rep < 100; ++rep) {
    const std::vector<double> x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto analytic = gmm_smoothed_score(m, 0.3, x);
    const auto fd = fd_score(m, 0.3, x, 1e-5);
    for (int j = 0; j < 2; ++j) {
      const double scale = std::max(1e-8, std::abs(fd[j]));
      CHECK(std::abs(analytic[j] - fd[j]) / scale < 1e-5);
    }
  }
}

TEST_CASE("all-means-equal mixture reduces to the isotropic gaussian score") {
  GaussianMixture m;
  m.dim = 2;
  m.weights = {0.3, 0.45, 0.25};
  m.means = {0.7, -0.1, 0.7, -0.1, 0.7, -0.1};
  m.component_std = 0.5;
  IsotropicGaussian g{{0.7, -0.1}, 0.5};
  Rng rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    const std::vector<double> x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const auto a = gmm_smoothed_score(m, 0.4, x);
    const auto b = gaussian_smoothed_score(g, 0.4, x);
    CHECK(std::abs(a[0] - b[0]) < 1e-12);
    CHECK(std::abs(a[1] - b[1]) < 1e-12);
  }
}

TEST_CASE("gaussian_smoothed_score closed form") {
  IsotropicGaussian g{{0.0, 0.0}, 1.0};
  const std::vector<double> mu{0.0, 0.0};
  CHECK(gaussian_smoothed_score(g, 0.5, mu)[0] == 0.0);
  const std::vector<double> x{2.0, 0.0};
  CHECK(gaussian_smoothed_score(g, 0.0, x)[0] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(gaussian_smoothed_score(g, 1.0, x)[0] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("particle CSV round-trip is lossless") {
  Rng rng(4711);
  ParticleSet ps(64, 3);
  for (double& v : ps.data) v = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
  const auto path = std::filesystem::temp_directory_path() / "driftlab_roundtrip.csv";
  write_particles_csv(ps, path.string());
  const ParticleSet back = read_particles_csv(path.string());
  REQUIRE(back.dim == ps.dim);
  CHECK(back.data == ps.data);
  std::filesystem::remove(path);
}

TEST_CASE("mixture validation rejects bad weights") {
  GaussianMixture m;
  m.dim = 1;
  m.weights = {0.6, 0.5};
  m.means = {0.0, 1.0};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}
