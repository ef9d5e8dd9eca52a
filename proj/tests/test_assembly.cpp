#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pbc/assembly.hpp"
#include "pbc/banded.hpp"
#include "pbc/errors.hpp"
#include "pbc/quadrature.hpp"

using namespace pbc;

namespace {

ParticleField layout_field(std::vector<double> positions, double eps) {
  ParticleField f;
  f.kernel = KernelSpec::gaussian(eps);
  f.positions = std::move(positions);
  f.weights.assign(f.positions.size(), 1.0);
  f.amplitudes.assign(f.positions.size(), 0.0);
  return f;
}

ParticleField wiggly_field(double h, double eps) {
  ParticleField f = seed_uniform({-3, 3, h, 0}, KernelSpec::gaussian(eps));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.positions[i];
    f.amplitudes[i] = h * (std::sin(1.7 * i) + 0.3 * std::cos(0.37 * i * i)) * std::exp(-0.2 * x * x);
  }
  return f;
}

double dense_integral(const std::function<double(double)>& g, double lo, double hi) {
  return quad::integrate_gauss_legendre(g, lo, hi, 4000);
}

}  // namespace

TEST_CASE("single-particle mass entry") {
  const GalerkinMatrices m = assemble(layout_field({0.0}, 1.0), {});
  CHECK(m.mass(0, 0) == doctest::Approx(0.39894228040143267794).epsilon(1e-14));
  CHECK(m.mass(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
}

TEST_CASE("closed-form mass entry against quadrature") {
  const GalerkinMatrices m = assemble(layout_field({0.0, 0.3}, 0.3), {});
  // 40-digit quadrature of delta(x) delta(x - 0.3)
  const double oracle = 0.80656908173047783266;
  CHECK(std::abs(m.mass(0, 1) - oracle) <= 1e-12 * oracle);
  CHECK(m.mass(0, 1) == m.mass(1, 0));
}

TEST_CASE("mass and stiffness entries for random pairs") {
  std::uint64_t state = 12345;
  auto uniform = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) / 9007199254740992.0;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const double eps = 0.05 + 0.9 * uniform();
    const double gap = 4.0 * eps * uniform() + 1e-3;
    const GalerkinMatrices m = assemble(layout_field({0.0, gap}, eps), {});
    const KernelSpec k = KernelSpec::gaussian(eps);
    const double lo = -12 * eps, hi = gap + 12 * eps;
    const double mass = quad::integrate_adaptive(
        [&](double x) { return kernel_eval(k, x) * kernel_eval(k, x - gap); }, lo, hi, 1e-13).value;
    const double stiff = quad::integrate_adaptive(
        [&](double x) { return kernel_grad(k, x) * kernel_grad(k, x - gap); }, lo, hi, 1e-13).value;
    CHECK(std::abs(m.mass(0, 1) - mass) <= 1e-12 * std::abs(mass) + 1e-14);
    CHECK(std::abs(m.stiffness(0, 1) - stiff) <= 1e-10 * m.stiffness(0, 0));
  }
}

TEST_CASE("seeded mass matrices are symmetric positive definite") {
  for (double eps : {0.1, 0.3, 0.5}) {
    const ParticleField f = seed_uniform({-5, 5, 0.1, 1.0}, KernelSpec::gaussian(eps));
    const GalerkinMatrices m = assemble(f, {});
    CHECK_NOTHROW(BandCholesky(m.mass, regularization_shift(m.mass, kMassRegularization)));
    for (std::size_t i = 0; i < f.size(); i += 17) {
      for (std::size_t j = 0; j < f.size(); j += 13) CHECK(m.mass(i, j) == m.mass(j, i));
    }
    // entries beyond the band radius are never stored
    const std::size_t far = static_cast<std::size_t>(std::ceil(kMatrixBandRadius * eps / 0.1)) + 2;
    CHECK(m.mass(0, far) == 0.0);
    CHECK(m.mass.bandwidth() <= far);
    std::vector<double> x(f.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(0.3 * i);
    CHECK(m.stiffness.quadratic_form(x) >= 0.0);
  }
}

TEST_CASE("coincident particles make the mass matrix singular") {
  ParticleField f = layout_field({0.0, 1e-9, 1.0}, 0.3);
  const GalerkinMatrices m = assemble(f, {});
  CHECK_THROWS_AS(BandCholesky(m.mass, 0.0), SingularMass);
}

TEST_CASE("load vector against adaptive quadrature") {
  const ParticleField f = seed_uniform({-2, 2, 0.2, 0}, KernelSpec::gaussian(0.3));
  const auto chi = [](double x) { return std::exp(-5 * x * x); };
  const GalerkinMatrices m = assemble(f, chi);
  const std::vector<double> adaptive = load_vector_adaptive(f, chi, 1e-14);
  for (std::size_t j = 0; j < f.size(); ++j) CHECK(m.load_chi[j] == doctest::Approx(adaptive[j]).epsilon(1e-11));
  // single particle at the origin: 1 / sqrt(1 + 5 eps^2)
  const GalerkinMatrices one = assemble(layout_field({0.0}, 0.3), chi);
  CHECK(one.load_chi[0] == doctest::Approx(0.83045479853739968828).epsilon(1e-12));
}

TEST_CASE("convection of a single kernel") {
  ParticleField f = layout_field({-0.3, 0.0, 0.3}, 0.3);
  f.amplitudes = {0.0, 1.0, 0.0};
  const std::vector<double> c = convection_apply(f, f);
  // int delta delta' delta(. -+ 0.3) to 20 digits
  CHECK(c[0] == doctest::Approx(2.3297258693570180251).epsilon(1e-8));
  CHECK(std::abs(c[1]) < 1e-12);
  CHECK(c[2] == doctest::Approx(-2.3297258693570180251).epsilon(1e-8));
}

TEST_CASE("convection symmetries") {
  ParticleField zero = seed_uniform({-1, 1, 0.1, 0}, KernelSpec::gaussian(0.2));
  ParticleField v = zero;
  for (double& a : v.amplitudes) a = 0.1;
  for (double c : convection_apply(zero, v)) CHECK(c == 0.0);

  // equal amplitudes on a symmetric layout: odd integrand about the center
  const std::vector<double> c = convection_apply(v, v);
  const std::size_t n = c.size();
  double largest = 0.0;
  for (double x : c) largest = std::max(largest, std::abs(x));
  CHECK(largest > 0.0);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(c[j] + c[n - 1 - j]) <= 1e-10 * largest);

  ParticleField other = v;
  other.positions[3] += 0.01;
  CHECK_THROWS_AS(convection_apply(v, other), InvalidArgument);
}

TEST_CASE("convection against dense quadrature") {
  const ParticleField f = wiggly_field(0.1, 0.3);
  ParticleField v = f;
  for (std::size_t i = 0; i < v.size(); ++i) v.amplitudes[i] = 0.1 * std::cos(0.5 * v.positions[i]);
  const std::vector<double> c = convection_apply(f, v);
  const double lo = f.positions.front() - 12 * 0.3, hi = f.positions.back() + 12 * 0.3;
  for (std::size_t j = 0; j < f.size(); j += 7) {
    const double pj = f.positions[j];
    const double ref = dense_integral(
        [&](double x) { return evaluate_field(f, x) * evaluate_field_dx(v, x) * kernel_eval(f.kernel, x - pj); },
        lo, hi);
    CHECK(std::abs(c[j] - ref) <= 1e-8);
  }
}

TEST_CASE("skew-symmetry defect") {
  ParticleField zero = seed_uniform({-1, 1, 0.1, 0}, KernelSpec::gaussian(0.3));
  CHECK(skew_symmetry_defect(zero) == 0.0);

  ParticleField single = layout_field({0.0}, 0.3);
  single.amplitudes = {1.0};
  CHECK(skew_symmetry_defect(single) < 1e-14);

  // int y^2 y' dx = 0 for a decaying field; the GL8 rule reproduces it to roundoff
  const ParticleField f = wiggly_field(0.1, 0.3);
  const double defect = skew_symmetry_defect(f);
  CHECK(defect < 1e-13);
  const double lo = f.positions.front() - 12 * 0.3, hi = f.positions.back() + 12 * 0.3;
  const double dense = std::abs(dense_integral(
      [&](double x) { const double y = evaluate_field(f, x); return y * y * evaluate_field_dx(f, x); }, lo, hi));
  CHECK(dense < 1e-12);
}

TEST_CASE("point samples at the particles") {
  const ParticleField f = wiggly_field(0.1, 0.3);
  const GalerkinMatrices m = assemble(f, {});
  const ParticleSamples s = sample_at_particles(f, m);
  for (std::size_t i = 0; i < f.size(); i += 5) {
    CHECK(s.values[i] == doctest::Approx(evaluate_field(f, f.positions[i])).epsilon(1e-12).scale(1e-14));
    CHECK(s.derivatives[i] == doctest::Approx(evaluate_field_dx(f, f.positions[i])).epsilon(1e-12).scale(1e-13));
  }
}

TEST_CASE("banded solver") {
  SymmetricBandMatrix a(5, 1);
  for (std::size_t i = 0; i < 5; ++i) a.set(i, i, 2.0);
  for (std::size_t i = 0; i + 1 < 5; ++i) a.set(i, i + 1, -1.0);
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> b = a.multiply(x);
  const BandCholesky chol(a, 0.0);
  const std::vector<double> y = chol.solve(b);
  for (std::size_t i = 0; i < 5; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-13));
  CHECK_THROWS_AS(a.set(0, 3, 1.0), InvalidArgument);
  CHECK(a(0, 4) == 0.0);
}
