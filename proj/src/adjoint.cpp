#include "pbc/adjoint.hpp"

#include <cmath>
#include <string>

#include "pbc/assembly.hpp"
#include "pbc/errors.hpp"

namespace pbc {

namespace {

void check_bounded(const ParticleField& field, const GalerkinMatrices& mats, double cap,
                   double t) {
  const ParticleSamples s = sample_at_particles(field, mats);
  for (double v : s.values) {
    if (!(std::abs(v) <= cap)) throw BlowUp("adjoint exceeds cap at t = " + std::to_string(t));
  }
}

}  // namespace

AdjointTrajectory solve_adjoint_terminal(const StateTrajectory& state,
                                         std::span<const double> terminal_rhs, double blowup_cap) {
  const TimeGrid& grid = state.grid;
  if (state.snapshots.size() != grid.nodes()) throw InvalidArgument("incomplete state trajectory");
  const std::size_t n = state.final_state().size();
  if (terminal_rhs.size() != n) throw InvalidArgument("terminal data size mismatch");
  const double dt = grid.dt();
  const double nu = state.nu;

  AdjointTrajectory adj;
  adj.grid = grid;
  adj.snapshots.resize(grid.nodes());

  const int last = grid.n_steps;
  GalerkinMatrices next = assemble(state.snapshots[last], {});
  {
    ParticleField terminal = state.snapshots[last];
    const BandCholesky factor(next.mass, regularization_shift(next.mass, kMassRegularization));
    terminal.amplitudes = factor.solve_refined(next.mass, terminal_rhs);
    check_bounded(terminal, next, blowup_cap, grid.time(last));
    adj.snapshots[last] = std::move(terminal);
  }

  for (int k = last - 1; k >= 0; --k) {
    const ParticleField& y_next = state.snapshots[k + 1];
    const ParticleField& p_next = adj.snapshots[k + 1];
    const ParticleSamples velocity = sample_at_particles(y_next, next);
    const std::vector<double> conv = relative_convection(*next.quadrature, y_next.amplitudes,
                                                         p_next.amplitudes, velocity.values);
    std::vector<double> rhs = next.mass.multiply(p_next.amplitudes);
    for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] += dt * conv[j];

    GalerkinMatrices current = assemble(state.snapshots[k], {});
    const SymmetricBandMatrix system = current.mass.plus_scaled(current.stiffness, dt * nu);
    const BandCholesky factor(system, regularization_shift(current.mass, kMassRegularization));
    ParticleField p = state.snapshots[k];
    p.amplitudes = factor.solve_refined(system, rhs);
    for (double b : p.amplitudes) {
      if (!std::isfinite(b)) throw BlowUp("non-finite adjoint amplitude at t = " + std::to_string(grid.time(k)));
    }
    check_bounded(p, current, blowup_cap, grid.time(k));
    adj.snapshots[k] = std::move(p);
    next = std::move(current);
  }
  return adj;
}

AdjointTrajectory solve_adjoint(const StateTrajectory& state,
                                const std::function<double(double)>& y_d, double blowup_cap) {
  const ParticleField& final_state = state.final_state();
  const GalerkinMatrices mats = assemble(final_state, {});
  std::vector<double> rhs = mats.quadrature->project(y_d);
  const std::vector<double> m_alpha = mats.mass.multiply(final_state.amplitudes);
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] -= m_alpha[j];
  return solve_adjoint_terminal(state, rhs, blowup_cap);
}

std::vector<double> apply_B_star(const AdjointTrajectory& adj,
                                 const std::function<double(double)>& chi) {
  std::vector<double> w(adj.snapshots.size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const ParticleField& p = adj.snapshots[k];
    const std::vector<double> b = NodalKernelTable(p).project(chi);
    double acc = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) acc += p.amplitudes[j] * b[j];
    w[k] = acc;
  }
  return w;
}

std::vector<double> apply_B_star(const AdjointTrajectory& adj, const StateTrajectory& state) {
  if (state.loads.size() != adj.snapshots.size()) throw GridMismatch("trajectory lengths differ");
  std::vector<double> w(adj.snapshots.size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto& b = state.loads[k];
    const auto& beta = adj.snapshots[k].amplitudes;
    if (b.size() != beta.size()) throw InvalidArgument("load vector missing for B*");
    double acc = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) acc += beta[j] * b[j];
    w[k] = acc;
  }
  return w;
}

}  // namespace pbc
