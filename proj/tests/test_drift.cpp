#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "driftlab/drift.hpp"
#include "driftlab/rng.hpp"

using namespace driftlab;

namespace {
ParticleSet make_1d(std::initializer_list<double> xs) {
  ParticleSet ps(static_cast<int>(xs.size()), 1);
  std::size_t i = 0;
  for (double v : xs) ps.data[i++] = v;
  return ps;
}

ParticleSet random_set(std::size_t n, int d, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  ParticleSet ps(static_cast<int>(n), d);
  for (double& v : ps.data) v = scale * rng.uniform(-2, 2);
  return ps;
}

// snap to multiples of 2^-16 so that adding a snapped shift is exact
double snap(double v) { return std::round(v * 65536.0) / 65536.0; }
}  // namespace

TEST_CASE("identical sample arrays give exactly zero drift") {
  const ParticleSet s = random_set(400, 2, 1);
  const std::vector<double> x{0.37, -0.85};
  for (KernelFamily fam : {KernelFamily::Gaussian, KernelFamily::Laplacian}) {
    KernelSpec spec{fam, 0.3, 2};
    const auto v = mean_shift_drift(x, s, s, spec);
    CHECK(v.v[0] == 0.0);
    CHECK(v.v[1] == 0.0);
    CHECK_FALSE(v.far_from_support);
  }
}

TEST_CASE("single-sample terms reduce to displacement difference") {
  ParticleSet p(1, 2), q(1, 2);
  p.data = {1.0, 2.0};
  q.data = {-0.5, 0.25};
  KernelSpec spec{KernelFamily::Gaussian, 0.7, 2};
  const std::vector<double> x{10.0, -3.0};
  const auto v = mean_shift_drift(x, p, q, spec);
  CHECK(v.v[0] == doctest::Approx(1.0 - (-0.5)).epsilon(1e-15));
  CHECK(v.v[1] == doctest::Approx(2.0 - 0.25).epsilon(1e-15));
}

TEST_CASE("1D two-point configuration matches the frozen softmax oracle") {
  const ParticleSet p = make_1d({-1.0, 1.0});
  const ParticleSet q = make_1d({0.0});
  KernelSpec g1{KernelFamily::Gaussian, 1.0, 1};

  const std::vector<double> origin{0.0};
  CHECK(mean_shift_drift(origin, p, q, g1).v[0] == doctest::Approx(0.0).epsilon(1e-16));

  const std::vector<double> x{0.5};
  // frozen from an independent high-precision softmax evaluation
  CHECK(mean_shift_drift(x, p, q, g1).v[0] ==
        doctest::Approx(0.46211715726000976).epsilon(1e-14));

  KernelSpec g03{KernelFamily::Gaussian, 0.3, 1};
  CHECK(mean_shift_drift(x, p, q, g03).v[0] ==
        doctest::Approx(0.99997010976967005).epsilon(1e-14));
}

TEST_CASE("multiscale drift is the sum of per-scale drifts") {
  const ParticleSet p = make_1d({-1.0, 1.0});
  const ParticleSet q = make_1d({0.0});
  const std::vector<double> x{0.5};
  const std::vector<KernelSpec> one{{KernelFamily::Gaussian, 1.0, 1}};
  CHECK(multiscale_drift(x, p, q, one).v[0] == mean_shift_drift(x, p, q, one[0]).v[0]);

  const std::vector<KernelSpec> two{{KernelFamily::Gaussian, 0.3, 1},
                                    {KernelFamily::Gaussian, 1.0, 1}};
  CHECK(multiscale_drift(x, p, q, two).v[0] ==
        doctest::Approx(1.4620872670296798).epsilon(1e-14));
  const double sum =
      mean_shift_drift(x, p, q, two[0]).v[0] + mean_shift_drift(x, p, q, two[1]).v[0];
  CHECK(multiscale_drift(x, p, q, two).v[0] == doctest::Approx(sum).epsilon(1e-16));

  const ParticleSet s = random_set(50, 1, 3);
  CHECK(multiscale_drift(x, s, s, two).v[0] == 0.0);
}

TEST_CASE("drift antisymmetry under swapping sample sets") {
  const ParticleSet p = random_set(64, 2, 10);
  const ParticleSet q = random_set(80, 2, 11);
  Rng rng(12);
  for (KernelFamily fam : {KernelFamily::Gaussian, KernelFamily::Laplacian}) {
    KernelSpec spec{fam, 0.4, 2};
    for (int rep = 0; rep < 25; ++rep) {
      const std::vector<double> x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
      const auto a = mean_shift_drift(x, p, q, spec);
      const auto b = mean_shift_drift(x, q, p, spec);
      CHECK(a.v[0] == -b.v[0]);
      CHECK(a.v[1] == -b.v[1]);
    }
  }
}

TEST_CASE("drift translation equivariance on representable inputs") {
  ParticleSet p = random_set(64, 2, 20);
  ParticleSet q = random_set(48, 2, 21);
  for (double& v : p.data) v = snap(v);
  for (double& v : q.data) v = snap(v);
  const std::vector<double> shift{0.5, -0.25};
  ParticleSet ps = p, qs = q;
  for (std::size_t i = 0; i < ps.n(); ++i)
    for (int j = 0; j < 2; ++j) ps.data[i * 2 + j] += shift[j];
  for (std::size_t i = 0; i < qs.n(); ++i)
    for (int j = 0; j < 2; ++j) qs.data[i * 2 + j] += shift[j];

  Rng rng(22);
  for (KernelFamily fam : {KernelFamily::Gaussian, KernelFamily::Laplacian}) {
    KernelSpec spec{fam, 0.3, 2};
    for (int rep = 0; rep < 25; ++rep) {
      const std::vector<double> x{snap(rng.uniform(-2, 2)), snap(rng.uniform(-2, 2))};
      const std::vector<double> xs{x[0] + shift[0], x[1] + shift[1]};
      const auto a = mean_shift_drift(x, p, q, spec);
      const auto b = mean_shift_drift(xs, ps, qs, spec);
      CHECK(a.v == b.v);
    }
  }
}

TEST_CASE("far-from-support fallback attracts to the nearest sample and flags") {
  ParticleSet p(2, 2);
  p.data = {0.0, 0.0, 1.0, 0.0};
  KernelSpec spec{KernelFamily::Gaussian, 0.05, 2};
  const std::vector<double> x{200.0, 0.0};
  const auto v = mean_shift_drift(x, p, p, spec);
  CHECK(v.far_from_support);
  // nearest sample is (1,0): both terms fall back identically, so V = 0
  CHECK(v.v[0] == 0.0);

  ParticleSet q(1, 2);
  q.data = {150.0, 0.0};
  const auto w = mean_shift_drift(x, p, q, spec);
  CHECK(w.far_from_support);
  CHECK(w.v[0] == doctest::Approx((1.0 - 200.0) - (150.0 - 200.0)).epsilon(1e-15));
}

TEST_CASE("analytic gaussian drift trivial cases") {
  GaussianMixture single;
  single.dim = 2;
  single.weights = {1.0};
  single.means = {0.3, -0.4};
  single.component_std = 0.8;
  IsotropicGaussian q{{0.3, -0.4}, 0.8};
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const std::vector<double> x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto v = analytic_gaussian_drift(x, single, q, 0.3);
    CHECK(std::abs(v[0]) < 1e-14);
    CHECK(std::abs(v[1]) < 1e-14);
  }
  // sigma^2 prefactor sends the drift to zero as sigma -> 0
  const GaussianMixture m = GaussianMixture::four_modes();
  IsotropicGaussian iso{{0.0, 0.0}, 1.0};
  const std::vector<double> x{0.5, 0.5};
  double prev = 1e300;
  for (double sigma : {1e-2, 1e-3, 1e-4}) {
    const auto v = analytic_gaussian_drift(x, m, iso, sigma);
    const double norm = std::hypot(v[0], v[1]);
    CHECK(norm < prev);
    prev = norm;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("empirical drift converges to the analytic score difference") {
  const GaussianMixture m = GaussianMixture::four_modes();
  IsotropicGaussian q{{0.0, 0.0}, 1.0};
  const ParticleSet probes = probe_grid_2d(10, 10, -2, 2, -2, 2);
  const ScoreIdentityReport rep = verify_score_identity(m, q, 0.3, 20000, probes, 5);
  CHECK(rep.mean_error < 5e-2);
  CHECK(rep.errors.size() == probes.n());

  // reusing p-samples as q-samples zeroes the empirical part exactly
  const ParticleSet ps = sample_gmm(m, 5000, 17);
  KernelSpec spec{KernelFamily::Gaussian, 0.3, 2};
  const DriftField zero_field = mean_shift_drift_field(probes, ps, ps, spec);
  for (double v : zero_field.vectors.data) CHECK(v == 0.0);
  double mean_analytic = 0.0;
  for (std::size_t i = 0; i < probes.n(); ++i) {
    const auto av = analytic_gaussian_drift(probes.point(i), m, q, 0.3);
    mean_analytic += std::hypot(av[0], av[1]);
  }
  mean_analytic /= probes.n();
  CHECK(mean_analytic > 0.0);  // the error in that case is exactly the analytic norm
}

TEST_CASE("score-identity error decreases with sample count") {
  const GaussianMixture m = GaussianMixture::four_modes();
  IsotropicGaussian q{{0.0, 0.0}, 1.0};
  Rng rng(77);
  ParticleSet probes(100, 2);
  for (double& v : probes.data) v = rng.uniform(-2, 2);
  double small_mean = 0.0, large_mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    small_mean += verify_score_identity(m, q, 0.3, 1000, probes, seed).mean_error;
    large_mean += verify_score_identity(m, q, 0.3, 50000, probes, seed).mean_error;
  }
  CHECK(large_mean / 5.0 < small_mean / 5.0);
}

TEST_CASE("drift input validation") {
  ParticleSet p(1, 2);
  p.data = {0.0, 0.0};
  ParticleSet bad(1, 3);
  bad.data = {0.0, 0.0, 0.0};
  KernelSpec spec{KernelFamily::Gaussian, 1.0, 2};
  const std::vector<double> x{0.0, 0.0};
  CHECK_THROWS_AS((void)mean_shift_drift(x, p, bad, spec), std::invalid_argument);
  CHECK_THROWS_AS((void)mean_shift_drift(x, ParticleSet{}, p, spec), std::invalid_argument);
  const std::vector<KernelSpec> none;
  CHECK_THROWS_AS((void)multiscale_drift(x, p, p, none), std::invalid_argument);
}

TEST_CASE("drift field CSV export") {
  const ParticleSet p = random_set(32, 2, 40);
  const ParticleSet q = random_set(32, 2, 41);
  const ParticleSet probes = probe_grid_2d(4, 4, -1, 1, -1, 1);
  KernelSpec spec{KernelFamily::Gaussian, 0.5, 2};
  const DriftField f = mean_shift_drift_field(probes, p, q, spec);
  const auto path = std::filesystem::temp_directory_path() / "driftlab_field.csv";
  f.write_csv(path.string());
  std::ifstream in(path);
  std::string head;
  std::getline(in, head);
  CHECK(head == "x0,x1,v0,v1,far");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 16);
  std::filesystem::remove(path);
}
