#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pbc/assembly.hpp"
#include "pbc/errors.hpp"
#include "pbc/forward.hpp"

using namespace pbc;

namespace {

const auto chi = [](double x) { return std::exp(-5 * x * x); };
const double chi_mass = std::sqrt(std::numbers::pi / 5.0);

ParticleField default_particles(double h = 0.1, double eps = 0.3) {
  return seed_uniform({-5, 5, h, 2.0}, KernelSpec::gaussian(eps));
}

}  // namespace

TEST_CASE("zero input keeps the zero state") {
  const TimeGrid grid{1.0, 50};
  const ParticleField init = default_particles();
  const StateTrajectory traj = solve_forward(init, ControlFunction::constant(grid, 0.0, 0, 100), grid, chi, 1.0);
  REQUIRE(traj.snapshots.size() == grid.nodes());
  for (const ParticleField& f : traj.snapshots) {
    CHECK(f.positions == init.positions);
    for (double a : f.amplitudes) REQUIRE(a == 0.0);
  }
  CHECK(mass_balance_defect(traj, traj.controls_used, chi) == 0.0);
}

TEST_CASE("mass balance for a constant source") {
  const TimeGrid grid{1.0, 500};
  const ControlFunction u = ControlFunction::constant(grid, 1.0, 0, 100);
  const StateTrajectory traj = solve_forward(default_particles(), u, grid, chi, 1.0);
  const double mass = total_mass(traj.final_state());
  CHECK(std::abs(mass - chi_mass) <= 0.02 * chi_mass);
  CHECK(mass_balance_defect(traj, u, chi) <= 0.02 * chi_mass);
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    CHECK(traj.snapshots[k].size() == traj.snapshots[0].size());
  }
}

TEST_CASE("mass defect is first order in dt") {
  auto defect = [](int steps) {
    const TimeGrid grid{1.0, steps};
    const ControlFunction u = ControlFunction::constant(grid, 1.0, 0, 100);
    return mass_balance_defect(solve_forward(default_particles(), u, grid, chi, 1.0), u, chi);
  };
  const double coarse = defect(250);
  const double fine = defect(500);
  CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("default setting stays bounded") {
  const TimeGrid grid{1.0, 500};
  const ControlFunction u = ControlFunction::constant(grid, 12.0, 0, 100);
  const StateTrajectory traj = solve_forward(default_particles(), u, grid, chi, 1.0);
  const ParticleField& last = traj.final_state();
  double peak = 0.0;
  for (double x = -3; x <= 3; x += 0.01) peak = std::max(peak, evaluate_field(last, x));
  CHECK(peak > 1.0);
  CHECK(peak < 20.0);
  CHECK_NOTHROW(last.validate());
}

TEST_CASE("blow-up cap") {
  const TimeGrid grid{1.0, 100};
  const ControlFunction u = ControlFunction::constant(grid, 50.0, 0, 100);
  CHECK_THROWS_AS(solve_forward(default_particles(), u, grid, chi, 1.0, 1.0), BlowUp);
}

TEST_CASE("argument checks") {
  const TimeGrid grid{1.0, 10};
  const ControlFunction other = ControlFunction::constant({1.0, 20}, 0.0, 0, 100);
  CHECK_THROWS_AS(solve_forward(default_particles(), other, grid, chi, 1.0), GridMismatch);
  const ControlFunction u = ControlFunction::constant(grid, 0.0, 0, 100);
  CHECK_THROWS_AS(solve_forward(default_particles(), u, grid, chi, 0.0), InvalidArgument);
}

TEST_CASE("cost examples") {
  const TimeGrid grid{1.0, 100};
  const auto y_d = [](double x) { return 10 * std::exp(-2 * x * x); };
  const ControlFunction zero = ControlFunction::constant(grid, 0.0, 0, 100);
  const StateTrajectory still = solve_forward(default_particles(), zero, grid, chi, 1.0);
  // 1/2 int 100 exp(-4x^2) dx = 25 sqrt(pi)
  CHECK(cost(still, zero, y_d, 0.05, -12, 12) == doctest::Approx(44.311346272637900682).epsilon(1e-10));

  const ControlFunction c = ControlFunction::constant(grid, 3.0, 0, 100);
  const StateTrajectory traj = solve_forward(default_particles(), c, grid, chi, 1.0);
  const ParticleField final_state = traj.final_state();
  const auto reached = [&](double x) { return evaluate_field(final_state, x); };
  CHECK(terminal_misfit(final_state, reached, -12, 12) < 1e-20);
  CHECK(cost(traj, c, reached, 0.05, -12, 12) == doctest::Approx(0.5 * 0.05 * 9.0).epsilon(1e-12));
}

TEST_CASE("trajectory csv") {
  const TimeGrid grid{1.0, 4};
  const ParticleField init = seed_uniform({-1, 1, 0.5, 0}, KernelSpec::gaussian(0.3));
  const StateTrajectory traj =
      solve_forward(init, ControlFunction::constant(grid, 1.0, 0, 100), grid, chi, 1.0);
  std::ostringstream out;
  write_trajectory_csv(out, grid, traj.snapshots, 3);
  const std::string text = out.str();
  // header + steps 0, 3 and the final step 4
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 5);
  CHECK(text.rfind("t,i,phi,omega,alpha\n", 0) == 0);
}
