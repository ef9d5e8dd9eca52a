#include "pbc/forward.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include "pbc/assembly.hpp"
#include "pbc/errors.hpp"
#include "pbc/quadrature.hpp"

namespace pbc {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

StateTrajectory solve_forward(const ParticleField& init, const ControlFunction& u,
                              const TimeGrid& grid, const std::function<double(double)>& chi,
                              double nu, double blowup_cap) {
  init.validate();
  grid.validate();
  u.validate();
  if (!(u.grid == grid)) throw GridMismatch("control and state time grids differ");
  if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");

  const double dt = grid.dt();
  StateTrajectory traj;
  traj.grid = grid;
  traj.controls_used = u;
  traj.nu = nu;
  traj.snapshots.reserve(grid.nodes());
  traj.loads.reserve(grid.nodes());

  ParticleField field = init;
  GalerkinMatrices mats = assemble(field, chi);
  traj.snapshots.push_back(field);
  traj.loads.push_back(mats.load_chi);

  for (int k = 0; k < grid.n_steps; ++k) {
    const ParticleSamples at = sample_at_particles(field, mats);
    const double peak = max_abs(at.values);
    if (!(peak <= blowup_cap)) {
      throw BlowUp("max |y_h| = " + std::to_string(peak) + " at t = " + std::to_string(grid.time(k)));
    }

    const std::vector<double> conv =
        relative_convection(*mats.quadrature, field.amplitudes, field.amplitudes, at.values);
    std::vector<double> rhs = mats.mass.multiply(field.amplitudes);
    const double source = 0.5 * dt * u.values[k];
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      rhs[j] += source * mats.load_chi[j] - dt * conv[j];
    }

    for (std::size_t i = 0; i < field.size(); ++i) field.positions[i] += dt * at.values[i];
    for (std::size_t i = 1; i < field.size(); ++i) {
      if (!(field.positions[i] > field.positions[i - 1])) {
        throw ParticleCrossing("particles " + std::to_string(i - 1) + " and " + std::to_string(i) +
                               " crossed at t = " + std::to_string(grid.time(k + 1)));
      }
    }
    transport_weights(field, at.derivatives, dt);

    mats = assemble(field, chi);
    const double source_next = 0.5 * dt * u.values[k + 1];
    for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] += source_next * mats.load_chi[j];

    const SymmetricBandMatrix system = mats.mass.plus_scaled(mats.stiffness, dt * nu);
    std::optional<BandCholesky> factor;
    try {
      factor.emplace(system, regularization_shift(mats.mass, kMassRegularization));
    } catch (const SingularMass& e) {
      throw SingularMass(std::string(e.what()).substr(sizeof("SingularMass: ") - 1) + " at t = " + std::to_string(grid.time(k + 1)));
    }
    field.amplitudes = factor->solve_refined(system, rhs);
    for (double a : field.amplitudes) {
      if (!std::isfinite(a)) throw BlowUp("non-finite amplitude at t = " + std::to_string(grid.time(k + 1)));
    }

    traj.snapshots.push_back(field);
    traj.loads.push_back(mats.load_chi);
  }
  return traj;
}

double total_mass(const ParticleField& field) {
  double sum = 0.0;
  for (double a : field.amplitudes) sum += a;
  return sum;
}

double mass_balance_defect(const StateTrajectory& traj, const ControlFunction& u,
                           const std::function<double(double)>& chi) {
  const ParticleField& first = traj.snapshots.front();
  const double radius = first.kernel.support();
  const double lo = first.positions.front() - radius;
  const double hi = first.positions.back() + radius;
  const double chi_mass = quad::integrate_adaptive(chi, lo, 0.5 * (lo + hi), 1e-13).value +
                          quad::integrate_adaptive(chi, 0.5 * (lo + hi), hi, 1e-13).value;
  const std::vector<double> ones(u.values.size(), 1.0);
  const double injected = l2_inner_time(u.grid, u.values, ones) * chi_mass;
  return std::abs(total_mass(traj.final_state()) - total_mass(first) - injected);
}

double terminal_misfit(const ParticleField& final_state, const std::function<double(double)>& y_d,
                       double lo, double hi) {
  final_state.validate();
  const NodalKernelTable table(final_state, lo, hi);
  std::vector<double> diff = table.sample(final_state.amplitudes);
  const auto nodes = table.nodes();
  for (std::size_t q = 0; q < diff.size(); ++q) {
    const double d = diff[q] - y_d(nodes[q]);
    diff[q] = d * d;
  }
  return 0.5 * table.integrate(diff);
}

double cost(const StateTrajectory& traj, const ControlFunction& u,
            const std::function<double(double)>& y_d, double sigma, double lo, double hi) {
  if (!(traj.grid == u.grid)) throw GridMismatch("control and state time grids differ");
  return terminal_misfit(traj.final_state(), y_d, lo, hi) + control_cost(u, sigma);
}

void write_trajectory_csv(std::ostream& out, const TimeGrid& grid,
                          const std::vector<ParticleField>& snapshots, int stride,
                          const char* amplitude_name) {
  write_snapshot_header(out, amplitude_name);
  const int last = static_cast<int>(snapshots.size()) - 1;
  stride = std::max(stride, 1);
  for (int k = 0; k <= last; ++k) {
    if (k % stride == 0 || k == last) write_snapshot_rows(out, grid.time(k), snapshots[k]);
  }
}

}  // namespace pbc
