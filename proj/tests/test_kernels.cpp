#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pbc/errors.hpp"
#include "pbc/kernels.hpp"

using pbc::KernelSpec;

TEST_CASE("kernel value at the origin") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  CHECK(pbc::kernel_eval(k, 0.0) == doctest::Approx(std::numbers::inv_sqrtpi).epsilon(1e-15));
  CHECK(pbc::kernel_eval(k, 100.0) < 1e-300);
}

TEST_CASE("kernel value against 40-digit evaluation") {
  // exp(-1) / (0.3 sqrt(pi)) to 20 digits
  const double oracle = 0.69184582903432450557;
  const double v = pbc::kernel_eval(KernelSpec::gaussian(0.3), 0.3);
  CHECK(std::abs(v - oracle) / oracle < 1e-14);
}

TEST_CASE("kernel is even and scales with epsilon") {
  for (double eps : {0.05, 0.3, 1.7}) {
    const KernelSpec k = KernelSpec::gaussian(eps);
    const KernelSpec unit = KernelSpec::gaussian(1.0);
    for (double x : {0.0, 1e-3, 0.07, 0.4, 2.5}) {
      CHECK(pbc::kernel_eval(k, x) == pbc::kernel_eval(k, -x));
      const double scaled = pbc::kernel_eval(unit, x / eps) / eps;
      CHECK(std::abs(pbc::kernel_eval(k, x) - scaled) <= 1e-14 * scaled);
    }
  }
}

TEST_CASE("kernel gradient") {
  const KernelSpec one = KernelSpec::gaussian(1.0);
  CHECK(pbc::kernel_grad(one, 0.0) == 0.0);
  const KernelSpec k = KernelSpec::gaussian(0.3);
  CHECK(pbc::kernel_grad(k, -0.1) == -pbc::kernel_grad(k, 0.1));

  const double step = 1e-6;
  const double fd = (pbc::kernel_eval(one, 0.5 + step) - pbc::kernel_eval(one, 0.5 - step)) / (2 * step);
  CHECK(std::abs(pbc::kernel_grad(one, 0.5) - fd) <= 1e-6 * std::abs(fd));

  // log-spaced offsets in [1e-3, 10 eps]; the finite-difference step follows x
  for (double x = 1e-3; x <= 10 * k.epsilon; x *= 1.5) {
    const double h = 1e-5 * std::max(x, 1e-2);
    const double central = (pbc::kernel_eval(k, x + h) - pbc::kernel_eval(k, x - h)) / (2 * h);
    CHECK(std::abs(pbc::kernel_grad(k, x) - central) <= 1e-6 * std::abs(central) + 1e-300);
  }
}

TEST_CASE("moment conditions of the Gaussian") {
  const pbc::MomentReport r = pbc::verify_moments(KernelSpec::gaussian(0.5), 1e-10);
  CHECK(r.pass);
  CHECK(std::abs(r.zeroth - 1.0) < 1e-10);
  CHECK(std::abs(r.first) < 1e-12);

  const pbc::MomentReport unit = pbc::verify_moments(KernelSpec::gaussian(1.0), 1e-10);
  CHECK(std::abs(unit.second - 0.5) < 1e-8);
  CHECK(std::isfinite(unit.r_th_abs));

  for (double eps : {0.05, 0.1, 0.3, 1.0}) {
    CAPTURE(eps);
    const pbc::MomentReport m = pbc::verify_moments(KernelSpec::gaussian(eps), 1e-10);
    CHECK(m.pass);
    CHECK(std::abs(m.second - 0.5 * eps * eps) <= 1e-8 * 0.5 * eps * eps);
  }
}

TEST_CASE("corrupted kernel fails the check") {
  const KernelSpec k = KernelSpec::gaussian(0.3);
  const pbc::MomentReport r = pbc::verify_moments(
      [&](double x) { return 1.1 * pbc::kernel_eval(k, x); }, k.epsilon, k.order_r, 1e-10);
  CHECK_FALSE(r.pass);
  CHECK(r.zeroth == doctest::Approx(1.1).epsilon(1e-10));
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(KernelSpec::gaussian(0.0), pbc::InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::gaussian(-1.0), pbc::InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::gaussian(INFINITY), pbc::InvalidArgument);
  KernelSpec bad = KernelSpec::gaussian(1.0);
  bad.order_r = 3;
  CHECK_THROWS_AS(bad.validate(), pbc::InvalidArgument);
}
