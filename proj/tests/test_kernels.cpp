#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "driftlab/kernels.hpp"
#include "driftlab/rng.hpp"

using namespace driftlab;

TEST_CASE("kernel_eval matches defining formulas") {
  KernelSpec gauss{KernelFamily::Gaussian, 1.0, 2};
  const std::vector<double> x{0.3, -0.7};
  CHECK(kernel_eval(gauss, x, x) == 1.0);

  KernelSpec lap{KernelFamily::Laplacian, 1.0, 1};
  const std::vector<double> a{0.0}, b{1.0};
  CHECK(kernel_eval(lap, a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  KernelSpec g03{KernelFamily::Gaussian, 0.3, 2};
  const std::vector<double> o{0.0, 0.0}, p{0.3, 0.0};
  // frozen: exp(-0.5) computed independently at high precision
  CHECK(kernel_eval(g03, o, p) == doctest::Approx(0.60653065971263342).epsilon(1e-15));
}

TEST_CASE("kernel_eval rejects dimension mismatch") {
  KernelSpec spec{KernelFamily::Gaussian, 1.0, 2};
  const std::vector<double> x{0.0, 0.0}, y{1.0};
  CHECK_THROWS_AS((void)kernel_eval(spec, x, y), std::invalid_argument);
  KernelSpec bad{KernelFamily::Gaussian, -1.0, 2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("kernel symmetry across families and bandwidths") {
  Rng rng(42);
  for (KernelFamily fam : {KernelFamily::Gaussian, KernelFamily::Laplacian}) {
    for (double bw : {0.05, 0.3, 1.0}) {
      KernelSpec spec{fam, bw, 3};
      for (int rep = 0; rep < 20; ++rep) {
        // points scaled with the bandwidth so the value stays representable
        std::vector<double> x(3), y(3);
        for (int j = 0; j < 3; ++j) {
          x[j] = bw * rng.uniform(-2, 2);
          y[j] = bw * rng.uniform(-2, 2);
        }
        CHECK(kernel_eval(spec, x, y) == kernel_eval(spec, y, x));
        CHECK(kernel_log_eval(spec, x, y) == kernel_log_eval(spec, y, x));
        CHECK(kernel_eval(spec, x, y) > 0.0);
      }
    }
  }
}

TEST_CASE("kernel_fourier profile values and monotone decay") {
  KernelSpec g1{KernelFamily::Gaussian, 1.0, 2};
  CHECK(kernel_fourier(g1, 0.0) == 1.0);
  CHECK(kernel_fourier(g1, std::sqrt(2.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  KernelSpec l1{KernelFamily::Laplacian, 1.0, 1};
  CHECK(kernel_fourier(l1, 0.0) == 1.0);
  CHECK(kernel_fourier(l1, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

  for (KernelFamily fam : {KernelFamily::Gaussian, KernelFamily::Laplacian}) {
    KernelSpec spec{fam, 0.7, 2};
    double prev = kernel_fourier(spec, 0.0);
    for (int i = 1; i < 100; ++i) {
      const double cur = kernel_fourier(spec, 0.1 * i);
      CHECK(cur < prev);
      CHECK(cur > 0.0);
      prev = cur;
    }
  }
}

TEST_CASE("schedule values") {
  BandwidthSchedule exp_s{ScheduleKind::Exponential, 1.5, 0.03, 1.0, 0.0};
  CHECK(schedule_sigma(exp_s, 0.0) == 1.5);
  CHECK(schedule_sigma(exp_s, 1e9) == 0.03);

  BandwidthSchedule lin{ScheduleKind::Linear, 1.5, 0.03, 0.0, 10.0};
  CHECK(schedule_sigma(lin, 5.0) == doctest::Approx(0.75).epsilon(1e-15));

  BandwidthSchedule cst{ScheduleKind::Constant, 2.0, 1.0, 0.0, 0.0};
  CHECK(schedule_sigma(cst, 123.0) == 2.0);
}

TEST_CASE("schedules are non-increasing and respect the floor") {
  std::vector<BandwidthSchedule> schedules = {
      {ScheduleKind::Constant, 1.5, 0.03, 0.0, 0.0},
      {ScheduleKind::Exponential, 1.5, 0.03, 0.2, 0.0},
      {ScheduleKind::Linear, 1.5, 0.03, 0.0, 37.0},
      {ScheduleKind::Cosine, 1.5, 0.03, 0.0, 37.0},
  };
  Rng rng(7);
  for (const auto& s : schedules) {
    s.validate();
    for (int rep = 0; rep < 200; ++rep) {
      double t1 = rng.uniform(0.0, 120.0);
      double t2 = rng.uniform(0.0, 120.0);
      if (t1 > t2) std::swap(t1, t2);
      const double s1 = schedule_sigma(s, t1), s2 = schedule_sigma(s, t2);
      CHECK(s2 <= s1);
      CHECK(s2 >= s.sigma_min);
      CHECK(s1 <= s.sigma0);
    }
  }
}

TEST_CASE("schedule validation") {
  BandwidthSchedule bad{ScheduleKind::Exponential, 1.0, 2.0, 1.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  BandwidthSchedule bad2{ScheduleKind::Linear, 1.0, 0.5, 0.0, -3.0};
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}
