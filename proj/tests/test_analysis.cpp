#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pbc/analysis.hpp"
#include "pbc/errors.hpp"

using namespace pbc;

namespace {

std::vector<double> grid_values(double lo, double hi, std::size_t n, double (*f)(double)) {
  std::vector<double> v(n);
  const double dx = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t m = 0; m < n; ++m) v[m] = f(lo + dx * m);
  return v;
}

struct Lcg {
  std::uint64_t state;
  double next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) / 9007199254740992.0;
  }
};

}  // namespace

TEST_CASE("grid norms") {
  const std::vector<double> one(101, 1.0);
  CHECK(norm_H(one, 0.01) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(norm_V(one, 0.01) == doctest::Approx(1.0).epsilon(1e-14));
  const std::vector<double> nothing(50, 0.0);
  CHECK(norm_H(nothing, 0.1) == 0.0);
  CHECK(norm_V(nothing, 0.1) == 0.0);

  auto sine_error = [](std::size_t n) {
    const auto v = grid_values(0, 1, n, [](double x) { return std::sin(std::numbers::pi * x); });
    const double dx = 1.0 / static_cast<double>(n - 1);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return std::array<double, 2>{std::abs(norm_H(v, dx) - std::sqrt(0.5)),
                                 std::abs(norm_V(v, dx) - std::sqrt(0.5 + pi2 / 2))};
  };
  const auto coarse = sine_error(201);
  const auto fine = sine_error(401);
  CHECK(coarse[1] < 1e-3);
  CHECK(coarse[1] / fine[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(fine[0] < 1e-12);
}

TEST_CASE("norm properties on random vectors") {
  Lcg rng{7};
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> a(40), b(40), sum(40), scaled(40);
    const double lambda = 4 * rng.next() - 2;
    for (std::size_t m = 0; m < a.size(); ++m) {
      a[m] = rng.next() - 0.5;
      b[m] = rng.next() - 0.5;
      sum[m] = a[m] + b[m];
      scaled[m] = lambda * a[m];
    }
    const double dx = 0.05;
    CHECK(norm_H(scaled, dx) == doctest::Approx(std::abs(lambda) * norm_H(a, dx)).epsilon(1e-13));
    CHECK(norm_V(scaled, dx) == doctest::Approx(std::abs(lambda) * norm_V(a, dx)).epsilon(1e-13));
    CHECK(norm_H(sum, dx) <= norm_H(a, dx) + norm_H(b, dx) + 1e-15);
    CHECK(norm_V(sum, dx) <= norm_V(a, dx) + norm_V(b, dx) + 1e-15);
    CHECK(norm_V(a, dx) >= norm_H(a, dx));
  }
}

TEST_CASE("time-space error against a sampled particle trajectory") {
  StateTrajectory traj;
  traj.grid = TimeGrid{1.0, 4};
  ParticleField f = seed_uniform({-3, 3, 0.1, 0}, KernelSpec::gaussian(0.3));
  ReferenceSolution ref;
  ref.grid = traj.grid;
  ref.x0 = -6.0;
  ref.dx = 1e-3;
  for (int k = 0; k <= traj.grid.n_steps; ++k) {
    for (std::size_t i = 0; i < f.size(); ++i) f.amplitudes[i] = 0.1 * (1 + k) * std::exp(-f.positions[i] * f.positions[i]);
    traj.snapshots.push_back(f);
    ref.y.push_back(evaluate_on_grid(f, ref.x0, ref.dx, 12001).values);
  }
  const double size = norm_L2V(ref, -5, 5);
  CHECK(size > 0.1);
  CHECK(error_L2V(traj, ref, -5, 5) < 1e-6 * size);

  // a relative perturbation of the reference shows up proportionally
  ReferenceSolution shifted = ref;
  for (auto& y : shifted.y) for (double& v : y) v *= 1.1;
  CHECK(error_L2V(traj, shifted, -5, 5) == doctest::Approx(0.1 * size).epsilon(1e-4));

  StateTrajectory scaled = traj;
  for (auto& s : scaled.snapshots) for (double& a : s.amplitudes) a *= -3;
  ReferenceSolution scaled_shifted = shifted;
  for (auto& y : scaled_shifted.y) for (double& v : y) v *= -3;
  CHECK(error_L2V(scaled, scaled_shifted, -5, 5) == doctest::Approx(3 * error_L2V(traj, shifted, -5, 5)).epsilon(1e-10));

  ReferenceSolution shorter = ref;
  shorter.y.pop_back();
  CHECK_THROWS_AS(error_L2V(traj, shorter, -5, 5), GridMismatch);
}

TEST_CASE("control error in H1") {
  auto error = [](int steps) {
    const TimeGrid grid{1.0, steps};
    ControlFunction a = ControlFunction::constant(grid, 0, -10, 10), b = a;
    for (int k = 0; k <= steps; ++k) a.values[k] = std::cos(std::numbers::pi * grid.time(k));
    return error_H1_time(a, b);
  };
  const double exact = std::sqrt(0.5 + std::numbers::pi * std::numbers::pi / 2);
  const double coarse = std::abs(error(100) - exact);
  const double fine = std::abs(error(200) - exact);
  CHECK(coarse < 1e-3);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));

  const TimeGrid grid{1.0, 20};
  ControlFunction u = ControlFunction::constant(grid, 2, 0, 100);
  CHECK(error_H1_time(u, u) == 0.0);
  ControlFunction v = u;
  for (int k = 0; k <= 20; ++k) v.values[k] = 2 + std::sin(k);
  ControlFunction w = u;
  for (int k = 0; k <= 20; ++k) w.values[k] = 2 + 3 * std::sin(k);
  CHECK(error_H1_time(w, u) == doctest::Approx(3 * error_H1_time(v, u)).epsilon(1e-13));
  CHECK_THROWS_AS(error_H1_time(u, ControlFunction::constant({1.0, 10}, 2, 0, 100)), GridMismatch);
}

TEST_CASE("slope fitting") {
  const std::vector<double> scales{0.2, 0.1, 0.05, 0.025};
  std::vector<double> square, root;
  for (double s : scales) {
    square.push_back(s * s);
    root.push_back(3 * std::sqrt(s));
  }
  CHECK(fit_slope(scales, square) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit_slope(scales, root) == doctest::Approx(0.5).epsilon(1e-12));

  std::vector<double> times_seven = root;
  for (double& e : times_seven) e *= 7;
  CHECK(fit_slope(scales, times_seven) == doctest::Approx(fit_slope(scales, root)).epsilon(1e-12));

  Lcg rng{2024};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> noisy;
    for (double s : scales) noisy.push_back(std::pow(s, 1.5) * (1 + 0.1 * (rng.next() - 0.5)));
    CHECK(std::abs(fit_slope(scales, noisy) - 1.5) <= 0.1);
  }

  CHECK_THROWS_AS(fit_slope(std::vector<double>{0.1, 0.2}, std::vector<double>{1, 2}), InvalidArgument);
  CHECK_THROWS_AS(fit_slope(scales, std::vector<double>{1, 0, 2, 3}), InvalidArgument);
  CHECK_THROWS_AS(fit_slope(std::vector<double>{0.1, 0.1, 0.1}, std::vector<double>{1, 2, 3}), DegenerateFit);
}

TEST_CASE("convergence report") {
  ConvergenceReport report;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double h : {0.2, 0.1, 0.05, 0.025}) report.records.push_back({h, 0.1, std::sqrt(h), 0.2 * std::sqrt(h), 1.0});
  report.records.push_back({0.0125, 0.1, nan, nan, 2.0});
  report.fit();
  CHECK(report.slope_y == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.slope_u == doctest::Approx(0.5).epsilon(1e-12));
  std::ostringstream out;
  report.write_csv(out);
  const std::string text = out.str();
  CHECK(text.rfind("h,epsilon,err_y_L2V,err_u_H1,runtime_s\n", 0) == 0);
  CHECK(text.find("# slope_y=") != std::string::npos);
  CHECK(text.find("nan") != std::string::npos);

  report.records.erase(report.records.begin() + 2, report.records.end() - 1);
  report.fit();
  CHECK(std::isnan(report.slope_y));
}
